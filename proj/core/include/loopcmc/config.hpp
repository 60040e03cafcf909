#pragma once

#include <map>
#include <string>

namespace loopcmc {

/// Flat key=value configuration with '#' comments. CLI flags override file values;
/// defaults fill the rest.
class RunConfig {
public:
    RunConfig();  // defaults

    static RunConfig from_file(const std::string& path);
    /// Overlay (later wins).
    void merge(const RunConfig& overrides);
    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;

    std::string get(const std::string& key) const;
    double get_double(const std::string& key) const;
    int get_int(const std::string& key) const;
    bool get_bool(const std::string& key) const;

    /// All keys and values, one per line, key=value.
    std::string print() const;

private:
    std::map<std::string, std::string> values_;
};

}  // namespace loopcmc
