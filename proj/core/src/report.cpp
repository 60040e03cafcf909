#include "loopcmc/report.hpp"

#include <cstdio>

namespace loopcmc {

void RunReport::section(const std::string& name) {
    if (!text_.empty()) text_ += "\n";
    text_ += "[" + name + "]\n";
}

void RunReport::kv(const std::string& key, const std::string& value) {
    text_ += key + ": " + value + "\n";
}

void RunReport::kv(const std::string& key, double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", value);
    kv(key, std::string(buf));
}

void RunReport::closing(const ClosingReport& rep, double tol) {
    kv("intrinsic_residual", rep.intrinsic);
    for (size_t i = 0; i < rep.extrinsic0.size(); ++i) {
        kv("extrinsic_lambda0_gen" + std::to_string(i), rep.extrinsic0[i]);
        kv("extrinsic_lambda1_gen" + std::to_string(i), rep.extrinsic1[i]);
        kv("extrinsic_sign_gen" + std::to_string(i),
           rep.extrinsic_sign[i] > 0 ? std::string("+1") : std::string("-1"));
    }
    kv("closes", rep.closes(tol) ? std::string("yes") : std::string("no"));
}

void RunReport::mesh_stats(const SurfaceMesh& mesh) {
    kv("vertices", static_cast<double>(mesh.vertices.size()));
    int valid = 0, skipped = 0;
    double min_pivot = 1e300;
    for (const auto& v : mesh.vertices) {
        if (v.skipped) {
            ++skipped;
            continue;
        }
        if (v.valid) {
            ++valid;
            min_pivot = std::min(min_pivot, v.pivot);
        }
    }
    kv("valid_vertices", static_cast<double>(valid));
    kv("skipped_vertices", static_cast<double>(skipped));
    kv("invalid_vertices", static_cast<double>(mesh.invalid_count()));
    kv("faces", static_cast<double>(mesh.faces.size()));
    if (valid > 0) kv("min_valid_pivot", min_pivot);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(mesh_hash(mesh)));
    kv("mesh_hash", std::string(buf));
}

}  // namespace loopcmc
