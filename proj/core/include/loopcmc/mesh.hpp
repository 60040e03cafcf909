#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "loopcmc/potential.hpp"
#include "loopcmc/sym.hpp"

namespace loopcmc {

enum class VizKind { Ball, Halfspace, Stereo };
VizKind viz_from_string(const std::string& s);
std::string to_string(VizKind v);

struct DomainSpec {
    enum class Kind { Disk, Annulus, Rect, HoledSphere };
    Kind kind = Kind::Disk;
    int nu = 24, nv = 24;  // resolution (radial/angular or x/y)
    double disk_radius = 0.9;
    double r_inner = 0.5, r_outer = 2.0;  // annulus (log-spaced radially)
    double x0 = -2, x1 = 2, y0 = -2, y1 = 2;  // rect
    struct Exclusion {
        cplx center;
        double radius;
    };
    std::vector<Exclusion> exclusions;
    cplx basepoint = 0.0;
};

/// Holed-sphere domain of a solved n-noid: |z| < 1 - delta minus delta-disks
/// around the in-disk punctures (out-of-disk punctures are handled by the cap).
DomainSpec open_nnoid_domain(const NnoidParams& params, double delta, int nu = 32, int nv = 32);

struct MeshVertex {
    cplx z;
    bool skipped = false;   // inside an exclusion, never computed
    bool valid = false;
    int branch = 1;
    double pivot = 0.0;
    double metric = 0.0;
    double membership = 0.0;
    Mat2 x;
    std::array<double, 5> lightcone{};
    std::array<double, 3> viz{};
    bool has_viz = false;
};

struct SurfaceMesh {
    int nu = 0, nv = 0;
    bool wrap_v = false;  // angular wrap for disk/annulus grids
    std::vector<MeshVertex> vertices;          // nu * nv, index i*nv + j
    std::vector<std::array<int, 4>> faces;     // quads over valid, same-branch corners
    std::string metadata;                      // key: value lines
    int invalid_count() const;
};

struct SampleOptions {
    int trunc = 24;
    OdeOptions ode{};
    double pivot_tol = 1e-7;
    bool keep_crossing = false;
    VizKind viz = VizKind::Ball;
    int threads = 0;
};

/// Sample the surface over the domain: spanning-tree frame integration from the
/// basepoint, per-vertex Iwasawa factorization and evaluation; vertices where the
/// factorization degenerates are marked invalid, faces across an ideal-boundary
/// crossing (branch flip) are dropped unless keep_crossing is set.
SurfaceMesh sample_surface(const Potential& pot, const MatrixLoop* unitarizer,
                           const DomainSpec& domain, const RealForm& form, const SymPoints& pts,
                           const SampleOptions& opts = {});

/// Wavefront OBJ (v/f records) plus a TSV sidecar `<path>.tsv` with columns
/// index validity pivot metric x0 x1 x2 x3 x4.
void export_obj(const SurfaceMesh& mesh, const std::string& path);

/// FNV-1a hash of the sidecar payload; deterministic across runs and thread counts.
std::uint64_t mesh_hash(const SurfaceMesh& mesh);

/// Radial boundary-crossing probe for rotationally symmetric examples: walks
/// z = exp(y) along [y0, y1] and returns the y positions where the factorization
/// branch flips (ideal-boundary crossings).
std::vector<double> radial_crossing_probe(const Potential& pot, const RealForm& form, double y0,
                                          double y1, int samples, const SampleOptions& opts = {});

}  // namespace loopcmc
