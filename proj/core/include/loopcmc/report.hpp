#pragma once

#include <string>
#include <vector>

#include "loopcmc/closing.hpp"
#include "loopcmc/mesh.hpp"

namespace loopcmc {

/// Plain-text key: value report blocks for a completed job.
class RunReport {
public:
    void section(const std::string& name);
    void kv(const std::string& key, const std::string& value);
    void kv(const std::string& key, double value);
    void closing(const ClosingReport& rep, double tol);
    void mesh_stats(const SurfaceMesh& mesh);
    std::string str() const { return text_; }

private:
    std::string text_;
};

}  // namespace loopcmc
