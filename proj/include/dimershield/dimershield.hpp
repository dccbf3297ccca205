#pragma once

#include "dimershield/units.hpp"
#include "dimershield/error.hpp"
#include "dimershield/angular.hpp"
#include "dimershield/molecule.hpp"
#include "dimershield/monomer.hpp"
#include "dimershield/pairbasis.hpp"
#include "dimershield/coupling.hpp"
#include "dimershield/propagator.hpp"
#include "dimershield/scan.hpp"
#include "dimershield/semiclassical.hpp"
