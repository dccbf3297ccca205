#pragma once

// CSV tables with round-trip float formatting and JSON run manifests.

#include <array>
#include <cmath>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "json.hpp"

#include "dimershield/error.hpp"

namespace dimershield::report {

// Shortest representation that parses back to the same double.
inline std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 32> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc()) throw Error("float formatting failed");
    return std::string(buf.data(), end);
}

inline std::string fmt(long long v) { return std::to_string(v); }
inline std::string fmt(int v) { return std::to_string(v); }
inline std::string fmt(std::size_t v) { return std::to_string(v); }

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add(std::vector<std::string> row) {
        if (row.size() != header_.size())
            throw DimensionError("csv row has " + std::to_string(row.size()) + " cells, header has " +
                                 std::to_string(header_.size()));
        rows_.push_back(std::move(row));
    }

    const std::vector<std::string>& header() const { return header_; }
    std::size_t size() const { return rows_.size(); }

    std::string str() const {
        std::ostringstream os;
        line(os, header_);
        for (const auto& r : rows_) line(os, r);
        return os.str();
    }

private:
    static std::string quote(const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) {
            if (c == '"') q += '"';
            q += c;
        }
        return q + "\"";
    }
    static void line(std::ostream& os, const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << quote(cells[i]);
        os << '\n';
    }

    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

inline std::string sha256_hex(const std::string& data) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), md, &len) != 1)
        throw Error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

// Collects written files so a failed run can remove them and a successful
// run can list them with content hashes.
class OutputSet {
public:
    explicit OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {}

    const std::filesystem::path& dir() const { return dir_; }

    void write(const std::string& name, const std::string& content) {
        std::filesystem::create_directories(dir_);
        const auto path = dir_ / name;
        std::ofstream f(path, std::ios::binary);
        if (!f) throw ConfigError("cannot write " + path.string());
        f << content;
        f.close();
        if (!f) throw ConfigError("write failed for " + path.string());
        files_.push_back({name, sha256_hex(content), content.size()});
    }

    nlohmann::json listing() const {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& f : files_) arr.push_back({{"path", f.name}, {"sha256", f.hash}, {"bytes", f.bytes}});
        return arr;
    }

    // Writes manifest.json listing every file written so far.
    void write_manifest(nlohmann::json manifest) {
        manifest["files"] = listing();
        write("manifest.json", manifest.dump(2) + "\n");
    }

    void remove_all() noexcept {
        std::error_code ec;
        for (const auto& f : files_) std::filesystem::remove(dir_ / f.name, ec);
        files_.clear();
    }

private:
    struct Entry {
        std::string name, hash;
        std::size_t bytes;
    };
    std::filesystem::path dir_;
    std::vector<Entry> files_;
};

}  // namespace dimershield::report
