#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kolmo/harness.hpp"

namespace kolmo {

/// Flat dotted-key configuration tree. The native encoding is
/// "section.key = value" lines ('#' comments); a file whose first
/// non-whitespace byte is '{' is parsed as the JSON encoding of the same
/// tree.
class Config {
  public:
    static Config from_file(const std::string& path);
    static Config from_string(const std::string& text);

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    std::string get(const std::string& key, const std::string& fallback) const;
    std::string require(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    /// Sorted canonical "key=value" lines; the basis of the config hash.
    std::string canonical() const;
    std::string hash() const;  // FNV-1a 64 over canonical(), hex
    std::string to_json() const;

    const std::map<std::string, std::string>& values() const { return values_; }

  private:
    std::map<std::string, std::string> values_;
};

std::uint64_t fnv1a64(const std::string& data);
std::string fnv1a64_hex(const std::string& data);
std::uint64_t file_fnv1a64(const std::string& path);

/// Validated numeric parsing with field-path diagnostics.
double config_positive(const Config& c, const std::string& key, double fallback);
double config_nonnegative(const Config& c, const std::string& key, double fallback);

void write_text_file(const std::string& path, const std::string& content);

/// reports.json / reports.csv with the frozen column schema
/// name,lhs,rhs,slack,se,budget,verdict,provenance.
void write_reports(const std::vector<EstimateReport>& reports, const std::string& json_path,
                   const std::string& csv_path);

std::string reports_to_json(const std::vector<EstimateReport>& reports);

}  // namespace kolmo
