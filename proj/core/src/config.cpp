#include "loopcmc/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace loopcmc {

namespace {
std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}
}  // namespace

RunConfig::RunConfig() {
    values_ = {
        {"form", "h3"},
        {"H", "0"},
        {"q", "2"},
        {"a", "0.1"},
        {"b", "0.35"},
        {"lambda0", "auto"},
        {"trunc", "64"},
        {"tol_ode", "1e-10"},
        {"pivot_tol", "1e-7"},
        {"domain", "auto"},
        {"res", "24x24"},
        {"delta", "0.1"},
        {"viz", "ball"},
        {"out", ""},
        {"report", ""},
        {"keep_crossing", "0"},
        {"threads", "0"},
        {"smyth_n", "1"},
        {"smyth_c", "1"},
        {"nnoid_t", "0.01"},
        {"nnoid_degree", "8"},
        {"nnoid_samples", "0"},
        {"nnoid_tmax", "0.05"},
        {"nnoid_tau", "21,3,32"},
        {"nnoid_p", "0.5,-0.5,3"},
        {"solution", ""},
    };
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: bad line " + std::to_string(lineno) + " in " + path);
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

void RunConfig::merge(const RunConfig& overrides) {
    for (const auto& [k, v] : overrides.values_) values_[k] = v;
}

void RunConfig::set(const std::string& key, const std::string& value) { values_[key] = value; }

bool RunConfig::has(const std::string& key) const { return values_.count(key) > 0; }

std::string RunConfig::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw std::out_of_range("config: unknown key " + key);
    return it->second;
}

double RunConfig::get_double(const std::string& key) const { return std::stod(get(key)); }
int RunConfig::get_int(const std::string& key) const { return std::stoi(get(key)); }

bool RunConfig::get_bool(const std::string& key) const {
    const std::string v = get(key);
    return v == "1" || v == "true" || v == "yes" || v == "on";
}

std::string RunConfig::print() const {
    std::ostringstream os;
    for (const auto& [k, v] : values_) os << k << "=" << v << "\n";
    return os.str();
}

}  // namespace loopcmc
