#include "loopcmc/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "loopcmc/factor.hpp"
#include "loopcmc/frame.hpp"
#include "loopcmc/parallel.hpp"

namespace loopcmc {

namespace {
constexpr double kPi = std::numbers::pi;
}

VizKind viz_from_string(const std::string& s) {
    if (s == "ball") return VizKind::Ball;
    if (s == "halfspace") return VizKind::Halfspace;
    if (s == "stereo") return VizKind::Stereo;
    throw std::invalid_argument("unknown viz kind: " + s);
}

std::string to_string(VizKind v) {
    switch (v) {
        case VizKind::Ball: return "ball";
        case VizKind::Halfspace: return "halfspace";
        case VizKind::Stereo: return "stereo";
    }
    return "?";
}

DomainSpec open_nnoid_domain(const NnoidParams& params, double delta, int nu, int nv) {
    DomainSpec d;
    d.kind = DomainSpec::Kind::Disk;
    d.disk_radius = 1.0 - delta;
    d.nu = nu;
    d.nv = nv;
    d.basepoint = 0.0;
    // holes must stay disjoint and keep the basepoint reachable
    for (int j = 0; j < params.ends(); ++j) {
        if (std::abs(params.z[j][0]) <= delta)
            throw std::invalid_argument("open_nnoid_domain: hole covers the basepoint");
        for (int k = j + 1; k < params.ends(); ++k)
            if (std::abs(params.z[j][0] - params.z[k][0]) < 2 * delta)
                throw std::invalid_argument("open_nnoid_domain: holes overlap");
    }
    // in-disk punctures get delta-holes; outer ones are handled by the cap
    for (int k = 0; k < params.ends(); ++k) {
        const cplx zk = params.z[k][0];
        if (std::abs(zk) < 1.0) d.exclusions.push_back({zk, delta});
    }
    return d;
}

int SurfaceMesh::invalid_count() const {
    int n = 0;
    for (const auto& v : vertices)
        if (!v.skipped && !v.valid) ++n;
    return n;
}

namespace {

struct Grid {
    std::vector<cplx> z;      // nu*nv
    std::vector<bool> skip;   // inside exclusions
    int nu, nv;
    bool wrap_v;
    int idx(int i, int j) const { return i * nv + j; }
};

Grid build_grid(const DomainSpec& d) {
    Grid g;
    g.nu = d.nu;
    g.nv = d.nv;
    g.wrap_v = d.kind == DomainSpec::Kind::Disk || d.kind == DomainSpec::Kind::Annulus ||
               d.kind == DomainSpec::Kind::HoledSphere;
    g.z.resize(size_t(d.nu) * d.nv);
    g.skip.assign(size_t(d.nu) * d.nv, false);
    for (int i = 0; i < d.nu; ++i) {
        for (int j = 0; j < d.nv; ++j) {
            cplx z;
            switch (d.kind) {
                case DomainSpec::Kind::Disk:
                case DomainSpec::Kind::HoledSphere: {
                    const double r = d.disk_radius * (i + 1.0) / d.nu;
                    z = std::polar(r, 2.0 * kPi * j / d.nv);
                    break;
                }
                case DomainSpec::Kind::Annulus: {
                    const double y = std::log(d.r_inner) +
                                     (std::log(d.r_outer) - std::log(d.r_inner)) * i / (d.nu - 1.0);
                    z = std::polar(std::exp(y), 2.0 * kPi * j / d.nv);
                    break;
                }
                case DomainSpec::Kind::Rect: {
                    const double x = d.x0 + (d.x1 - d.x0) * i / (d.nu - 1.0);
                    const double y = d.y0 + (d.y1 - d.y0) * j / (d.nv - 1.0);
                    z = cplx(x, y);
                    break;
                }
            }
            g.z[g.idx(i, j)] = z;
            for (const auto& e : d.exclusions)
                if (std::abs(z - e.center) < e.radius) g.skip[g.idx(i, j)] = true;
        }
    }
    return g;
}

std::vector<cplx> collocation(int trunc) {
    const int m = 4 * std::max(trunc, 1);
    std::vector<cplx> lams(m);
    for (int j = 0; j < m; ++j) lams[j] = std::polar(1.0, 2.0 * kPi * (j + 0.5) / m);
    return lams;
}

}  // namespace

SurfaceMesh sample_surface(const Potential& pot, const MatrixLoop* unitarizer,
                           const DomainSpec& domain, const RealForm& form, const SymPoints& pts,
                           const SampleOptions& opts) {
    const Grid grid = build_grid(domain);
    const int nverts = grid.nu * grid.nv;
    const std::vector<cplx> lams = collocation(opts.trunc);
    const int m = static_cast<int>(lams.size());

    OdeOptions ode = opts.ode;
    ode.threads = opts.threads;

    // Frame pass: breadth-first spanning tree over the grid graph from the vertex
    // closest to the basepoint; each edge is one short integration per lambda.
    std::vector<std::vector<Mat2>> frames(nverts);
    std::vector<int> state(nverts, 0);  // 0 unvisited, 1 frontier, 2 done
    int root = -1;
    double best = 1e300;
    for (int v = 0; v < nverts; ++v) {
        if (grid.skip[v]) continue;
        const double dd = std::abs(grid.z[v] - domain.basepoint);
        if (dd < best) {
            best = dd;
            root = v;
        }
    }
    if (root < 0) throw std::invalid_argument("sample_surface: empty domain");

    // basepoint -> root
    {
        std::vector<Mat2> init(m, Mat2::identity());
        if (std::abs(grid.z[root] - domain.basepoint) > 0) {
            const Path p0 = Path::line(domain.basepoint, grid.z[root]);
            init = integrate_values(pot, p0, lams, ode);
        }
        if (unitarizer) {
            for (int j = 0; j < m; ++j) init[j] = unitarizer->eval(lams[j]) * init[j];
        }
        frames[root] = std::move(init);
    }
    state[root] = 2;

    std::deque<int> frontier{root};
    auto neighbors = [&](int v, std::vector<int>& out) {
        out.clear();
        const int i = v / grid.nv, j = v % grid.nv;
        if (i + 1 < grid.nu) out.push_back(grid.idx(i + 1, j));
        if (i - 1 >= 0) out.push_back(grid.idx(i - 1, j));
        const int jp = grid.wrap_v ? (j + 1) % grid.nv : j + 1;
        const int jm = grid.wrap_v ? (j - 1 + grid.nv) % grid.nv : j - 1;
        if (jp >= 0 && jp < grid.nv) out.push_back(grid.idx(i, jp));
        if (jm >= 0 && jm < grid.nv) out.push_back(grid.idx(i, jm));
    };

    std::vector<int> nb;
    std::vector<std::pair<int, int>> layer_edges;  // (parent, child)
    while (!frontier.empty()) {
        layer_edges.clear();
        std::vector<int> layer(frontier.begin(), frontier.end());
        frontier.clear();
        for (int v : layer) {
            neighbors(v, nb);
            for (int w : nb) {
                if (grid.skip[w] || state[w] != 0) continue;
                state[w] = 1;
                layer_edges.emplace_back(v, w);
                frontier.push_back(w);
            }
        }
        // integrate the layer's edges in parallel over (edge, lambda-block)
        parallel_for(
            layer_edges.size(),
            [&](size_t e) {
                const auto [v, w] = layer_edges[e];
                const Path edge = Path::line(grid.z[v], grid.z[w]);
                OdeOptions serial = ode;
                serial.threads = 1;
                std::vector<Mat2> fw(m);
                for (int j = 0; j < m; ++j)
                    fw[j] = integrate_values(pot, edge, std::span<const cplx>(&lams[j], 1), serial,
                                             frames[v][j])[0];
                frames[w] = std::move(fw);
            },
            opts.threads);
        for (const auto& [v, w] : layer_edges) state[w] = 2;
    }

    SurfaceMesh mesh;
    mesh.nu = grid.nu;
    mesh.nv = grid.nv;
    mesh.wrap_v = grid.wrap_v;
    mesh.vertices.resize(nverts);

    // Factor-and-evaluate pass, parallel over vertices.
    parallel_for(
        size_t(nverts),
        [&](size_t v) {
            MeshVertex& mv = mesh.vertices[v];
            mv.z = grid.z[v];
            mv.skipped = grid.skip[v] || state[v] != 2;
            if (mv.skipped) return;
            const MatrixLoop phi = MatrixLoop::from_samples(frames[v], opts.trunc, 1.0);
            IwasawaOptions iopts;
            iopts.allow_branch_flip = true;
            iopts.pivot_floor = 0.0;
            try {
                const IwasawaResult iw = iwasawa(phi, form, iopts);
                mv.pivot = iw.pivot;
                mv.branch = iw.branch_sign;
                if (iw.pivot <= opts.pivot_tol) return;  // at the ideal boundary
                const ModelPoint mp = sym_evaluate(iw.unitary, pts, 1e-2);
                mv.x = mp.x;
                mv.membership = mp.membership;
                mv.lightcone = mp.lightcone;
                mv.branch = iw.branch_sign;
                if (pot.coeffs)
                    mv.metric = metric_factor(iw.positive.coeff(0), pot.coeffs(mv.z).coeff(-1), pts);
                mv.valid = true;
                // visualization coordinates
                switch (opts.viz) {
                    case VizKind::Ball: {
                        if (pts.form.space == SpaceForm::H3) {
                            mv.viz = h3_matrix_to_ball(mv.x, nullptr);
                            mv.has_viz = true;
                        } else {
                            mv.viz = stereographic_from_lightcone(mv.lightcone);
                            mv.has_viz = true;
                        }
                        break;
                    }
                    case VizKind::Halfspace: {
                        if (pts.form.space == SpaceForm::H3) {
                            mv.viz = ball_to_halfspace(h3_matrix_to_ball(mv.x, nullptr));
                            mv.has_viz = true;
                        } else {
                            mv.viz = stereographic_from_lightcone(mv.lightcone);
                            mv.has_viz = true;
                        }
                        break;
                    }
                    case VizKind::Stereo: {
                        // normalize the lightcone vector with positive x0 and project
                        auto lc = mv.lightcone;
                        if (lc[0] < 0)
                            for (auto& c : lc) c = -c;
                        mv.viz = stereographic_from_lightcone(lc);
                        mv.has_viz = true;
                        break;
                    }
                }
            } catch (const BigCellError& e) {
                mv.pivot = e.margin();
                mv.valid = false;
            } catch (const std::domain_error&) {
                mv.valid = false;
            }
        },
        opts.threads);

    // Faces: quads over valid corners; drop branch flips unless keep_crossing.
    const int ni = grid.nu - 1;
    const int njmax = grid.wrap_v ? grid.nv : grid.nv - 1;
    for (int i = 0; i < ni; ++i) {
        for (int j = 0; j < njmax; ++j) {
            const int jn = (j + 1) % grid.nv;
            const std::array<int, 4> q{grid.idx(i, j), grid.idx(i + 1, j), grid.idx(i + 1, jn),
                                       grid.idx(i, jn)};
            bool ok = true;
            for (int c : q)
                if (!mesh.vertices[c].valid) ok = false;
            if (ok && !opts.keep_crossing) {
                const int b = mesh.vertices[q[0]].branch;
                for (int c : q)
                    if (mesh.vertices[c].branch != b) ok = false;
            }
            if (ok) mesh.faces.push_back(q);
        }
    }
    std::ostringstream meta;
    meta << "potential: " << pot.description << "\n"
         << "form: " << to_string(form.space) << "\n"
         << "lambda0: " << pts.lambda0 << "\n"
         << "lambda1: " << pts.lambda1 << "\n"
         << "trunc: " << opts.trunc << "\n"
         << "tol_ode: " << opts.ode.tol << "\n"
         << "pivot_tol: " << opts.pivot_tol << "\n";
    mesh.metadata = meta.str();
    return mesh;
}

namespace {
std::string sidecar_payload(const SurfaceMesh& mesh) {
    std::string out = "index\tvalidity\tpivot\tmetric\tx0\tx1\tx2\tx3\tx4\n";
    char buf[512];
    for (size_t i = 0; i < mesh.vertices.size(); ++i) {
        const MeshVertex& v = mesh.vertices[i];
        std::snprintf(buf, sizeof(buf),
                      "%zu\t%d\t%.17g\t%.17g\t%.17g\t%.17g\t%.17g\t%.17g\t%.17g\n", i,
                      v.skipped ? -1 : (v.valid ? 1 : 0), v.pivot, v.metric, v.lightcone[0],
                      v.lightcone[1], v.lightcone[2], v.lightcone[3], v.lightcone[4]);
        out += buf;
    }
    return out;
}
}  // namespace

void export_obj(const SurfaceMesh& mesh, const std::string& path) {
    if (mesh.vertices.empty()) throw std::invalid_argument("export_obj: empty mesh");
    std::ofstream obj(path);
    if (!obj) throw std::runtime_error("export_obj: cannot open " + path);
    obj << "# loopcmc surface mesh\n";
    std::vector<int> remap(mesh.vertices.size(), 0);
    int next = 1;
    char buf[256];
    for (size_t i = 0; i < mesh.vertices.size(); ++i) {
        const MeshVertex& v = mesh.vertices[i];
        if (!v.valid || !v.has_viz) continue;
        remap[i] = next++;
        std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", v.viz[0], v.viz[1], v.viz[2]);
        obj << buf;
    }
    for (const auto& f : mesh.faces) {
        bool ok = true;
        for (int c : f)
            if (!remap[c]) ok = false;
        if (!ok) continue;
        obj << "f " << remap[f[0]] << " " << remap[f[1]] << " " << remap[f[2]] << " "
            << remap[f[3]] << "\n";
    }
    obj.close();
    std::ofstream tsv(path + ".tsv");
    if (!tsv) throw std::runtime_error("export_obj: cannot open " + path + ".tsv");
    tsv << sidecar_payload(mesh);
}

std::uint64_t mesh_hash(const SurfaceMesh& mesh) {
    const std::string payload = sidecar_payload(mesh);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : payload) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::vector<double> radial_crossing_probe(const Potential& pot, const RealForm& form, double y0,
                                          double y1, int samples, const SampleOptions& opts) {
    const std::vector<cplx> lams = collocation(opts.trunc);
    OdeOptions ode = opts.ode;
    ode.threads = opts.threads;
    std::vector<int> sign(samples, 0);
    std::vector<Mat2> cur(lams.size(), Mat2::identity());
    // start at z = 1 (frames of the rotational families are based there)
    double yprev = 0.0;
    {
        const Path p = Path::line(1.0, std::exp(cplx(y0, 0.0)));
        cur = integrate_values(pot, p, lams, ode);
        yprev = y0;
    }
    std::vector<double> ys(samples);
    for (int i = 0; i < samples; ++i) {
        const double y = y0 + (y1 - y0) * i / (samples - 1.0);
        ys[i] = y;
        if (y != yprev) {
            const Path p = Path::line(std::exp(cplx(yprev, 0.0)), std::exp(cplx(y, 0.0)));
            std::vector<Mat2> nxt(lams.size());
            parallel_for(
                lams.size(),
                [&](size_t j) {
                    OdeOptions serial = ode;
                    serial.threads = 1;
                    nxt[j] = integrate_values(pot, p, std::span<const cplx>(&lams[j], 1), serial,
                                              cur[j])[0];
                },
                opts.threads);
            cur = std::move(nxt);
            yprev = y;
        }
        const MatrixLoop phi = MatrixLoop::from_samples(cur, opts.trunc, 1.0);
        IwasawaOptions iopts;
        iopts.allow_branch_flip = true;
        iopts.pivot_floor = 0.0;
        try {
            const IwasawaResult iw = iwasawa(phi, form, iopts);
            sign[i] = iw.pivot <= opts.pivot_tol ? 0 : iw.branch_sign;
        } catch (const BigCellError&) {
            sign[i] = 0;
        }
    }
    std::vector<double> crossings;
    int prev = 0;
    double prev_y = y0;
    for (int i = 0; i < samples; ++i) {
        if (sign[i] == 0) {
            crossings.push_back(ys[i]);  // landed on the boundary itself
            continue;
        }
        if (prev != 0 && sign[i] != prev) crossings.push_back(0.5 * (prev_y + ys[i]));
        prev = sign[i];
        prev_y = ys[i];
    }
    std::sort(crossings.begin(), crossings.end());
    // merge crossings within one grid cell
    const double cell = (y1 - y0) / std::max(samples - 1, 1);
    std::vector<double> merged;
    for (double c : crossings)
        if (merged.empty() || c - merged.back() > 1.5 * cell) merged.push_back(c);
    return merged;
}

}  // namespace loopcmc
