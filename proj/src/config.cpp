#include "kolmo/config.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace kolmo {

namespace {

void flatten_json(const nlohmann::json& node, const std::string& prefix,
                  std::map<std::string, std::string>& out) {
    if (node.is_object()) {
        for (const auto& [key, child] : node.items()) {
            const std::string next = prefix.empty() ? key : prefix + "." + key;
            flatten_json(child, next, out);
        }
    } else if (node.is_string()) {
        out[prefix] = node.get<std::string>();
    } else {
        out[prefix] = node.dump();
    }
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

Config Config::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_string(buf.str());
}

Config Config::from_string(const std::string& text) {
    Config cfg;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        const auto json = nlohmann::json::parse(text);
        flatten_json(json, "", cfg.values_);
        return cfg;
    }
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: line " + std::to_string(lineno) +
                                     ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw std::runtime_error("config: empty key at line " + std::to_string(lineno));
        cfg.values_[key] = value;
    }
    return cfg;
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

std::string Config::require(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw std::runtime_error("config: missing required key '" + key + "'");
    return it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw std::runtime_error("config: " + key + ": not a number ('" + it->second + "')");
    }
}

int Config::get_int(const std::string& key, int fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        return std::stoi(it->second);
    } catch (const std::exception&) {
        throw std::runtime_error("config: " + key + ": not an integer ('" + it->second + "')");
    }
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw std::runtime_error("config: " + key + ": expected true/false");
}

std::string Config::canonical() const {
    std::ostringstream out;
    for (const auto& [k, v] : values_) out << k << "=" << v << "\n";
    return out.str();
}

std::string Config::hash() const { return fnv1a64_hex(canonical()); }

std::string Config::to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : values_) j[k] = v;
    return j.dump(2);
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string fnv1a64_hex(const std::string& data) {
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(data);
    return out.str();
}

std::uint64_t file_fnv1a64(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("hash: cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return fnv1a64(buf.str());
}

double config_positive(const Config& c, const std::string& key, double fallback) {
    const double v = c.get_double(key, fallback);
    if (!(v > 0.0)) throw std::runtime_error("config: " + key + ": must be positive");
    return v;
}

double config_nonnegative(const Config& c, const std::string& key, double fallback) {
    const double v = c.get_double(key, fallback);
    if (!(v >= 0.0)) throw std::runtime_error("config: " + key + ": must be nonnegative");
    return v;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write: cannot open " + path);
    out << content;
}

std::string reports_to_json(const std::vector<EstimateReport>& reports) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) {
        arr.push_back({{"name", r.name},
                       {"lhs", r.lhs},
                       {"rhs", r.rhs},
                       {"slack", r.slack()},
                       {"se", r.se},
                       {"budget", r.budget},
                       {"identity", r.identity},
                       {"verdict", r.pass ? "pass" : "fail"},
                       {"provenance", r.provenance}});
    }
    return arr.dump(2);
}

void write_reports(const std::vector<EstimateReport>& reports, const std::string& json_path,
                   const std::string& csv_path) {
    if (reports.empty()) throw std::runtime_error("write_reports: empty bundle");
    write_text_file(json_path, reports_to_json(reports) + "\n");
    std::ostringstream csv;
    csv.precision(17);
    csv << "name,lhs,rhs,slack,se,budget,verdict,provenance\n";
    for (const auto& r : reports)
        csv << r.name << "," << r.lhs << "," << r.rhs << "," << r.slack() << "," << r.se << ","
            << r.budget << "," << (r.pass ? "pass" : "fail") << "," << r.provenance << "\n";
    write_text_file(csv_path, csv.str());
}

}  // namespace kolmo
