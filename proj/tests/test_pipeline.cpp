#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "loopcmc/config.hpp"
#include "loopcmc/mesh.hpp"
#include "loopcmc/report.hpp"
#include "testutil.hpp"

using namespace loopcmc;
using testutil::mat_dist;

namespace {

SurfaceMesh sphere_mesh(double radius, int nu, int nv, int threads = 0,
                        bool keep_crossing = false) {
    const Potential pot = sphere_potential();
    DomainSpec dom;
    dom.kind = DomainSpec::Kind::Disk;
    dom.disk_radius = radius;
    dom.nu = nu;
    dom.nv = nv;
    dom.basepoint = 0.0;
    SampleOptions opts;
    opts.trunc = 8;
    opts.ode.tol = 1e-11;
    opts.threads = threads;
    opts.keep_crossing = keep_crossing;
    SymPoints pts;
    pts.form = form_h3();
    pts.lambda0 = 1.0;
    pts.lambda1 = -1.0;
    return sample_surface(pot, nullptr, dom, form_h3(), pts, opts);
}

int count_lines_starting(const std::string& path, const std::string& prefix) {
    std::ifstream in(path);
    std::string line;
    int n = 0;
    while (std::getline(in, line))
        if (line.rfind(prefix, 0) == 0) ++n;
    return n;
}

}  // namespace

TEST_CASE("sample_surface on the geodesic disk") {
    SUBCASE("inside the unit disk everything is valid and matches the closed form") {
        const SurfaceMesh mesh = sphere_mesh(0.9, 6, 8);
        CHECK(mesh.invalid_count() == 0);
        double dev = 0.0;
        for (const auto& v : mesh.vertices) {
            if (v.skipped) continue;
            CHECK(v.valid);
            CHECK(v.branch == 1);
            dev = std::max(dev, mat_dist(v.x, testutil::sphere_surface(v.z)));
        }
        CHECK(dev < 1e-6);
    }
    SUBCASE("radius 1.2 develops an invalid ring near |z| = 1") {
        const SurfaceMesh mesh = sphere_mesh(1.2, 10, 8);
        // vertices beyond the unit circle continue into the second copy
        int outside = 0;
        for (const auto& v : mesh.vertices) {
            if (v.skipped || !v.valid) continue;
            if (std::abs(v.z) > 1.0) {
                ++outside;
                CHECK(v.branch == -1);
            }
        }
        CHECK(outside > 0);
        // faces across the crossing are dropped: strictly fewer faces than the
        // full grid, and none mixes branches
        CHECK(mesh.faces.size() < size_t(9 * 8));
        for (const auto& f : mesh.faces) {
            const int b = mesh.vertices[f[0]].branch;
            for (int c : f) CHECK(mesh.vertices[c].branch == b);
        }
    }
    SUBCASE("keep-crossing keeps the continuation faces") {
        const SurfaceMesh dropped = sphere_mesh(1.2, 10, 8, 0, false);
        const SurfaceMesh kept = sphere_mesh(1.2, 10, 8, 0, true);
        CHECK(kept.faces.size() > dropped.faces.size());
    }
    SUBCASE("deterministic across thread counts") {
        const SurfaceMesh a = sphere_mesh(0.8, 5, 6, 1);
        const SurfaceMesh b = sphere_mesh(0.8, 5, 6, 4);
        CHECK(mesh_hash(a) == mesh_hash(b));
    }
}

TEST_CASE("spanning tree path independence") {
    // different basepoints induce different spanning trees; the frames and hence
    // the model points must agree
    const Potential pot = delaunay_potential_h3(2.0);
    DomainSpec dom;
    dom.kind = DomainSpec::Kind::Annulus;
    dom.r_inner = 0.8;
    dom.r_outer = 1.3;
    dom.nu = 4;
    dom.nv = 8;
    SampleOptions opts;
    opts.trunc = 12;
    opts.ode.tol = 1e-11;
    SymPoints pts;
    pts.form = form_h3();
    pts.lambda0 = 1.0;
    pts.lambda1 = -1.0;
    dom.basepoint = 1.0;
    const SurfaceMesh a = sample_surface(pot, nullptr, dom, form_h3(), pts, opts);
    dom.basepoint = cplx(0.0, 1.05);
    const SurfaceMesh b = sample_surface(pot, nullptr, dom, form_h3(), pts, opts);
    REQUIRE(a.vertices.size() == b.vertices.size());
    double dev = 0.0;
    for (size_t i = 0; i < a.vertices.size(); ++i) {
        if (!a.vertices[i].valid || !b.vertices[i].valid) continue;
        dev = std::max(dev, mat_dist(a.vertices[i].x, b.vertices[i].x));
    }
    CHECK(dev < 10 * 1e-9);
}

TEST_CASE("export_obj") {
    const std::string path = "/tmp/loopcmc_test_mesh.obj";
    SUBCASE("full grid exports all vertices and quads") {
        const SurfaceMesh mesh = sphere_mesh(0.5, 2, 3);
        export_obj(mesh, path);
        CHECK(count_lines_starting(path, "v ") == 6);
        CHECK(count_lines_starting(path, "f ") == 6);  // 1 radial layer x 3 wrapped
        std::remove(path.c_str());
        std::remove((path + ".tsv").c_str());
    }
    SUBCASE("faces touching invalid vertices are omitted and indices remap") {
        SurfaceMesh mesh = sphere_mesh(0.5, 3, 3);
        mesh.vertices[4].valid = false;  // knock out one vertex
        // rebuild faces the way sample_surface would have: drop the stale list
        std::vector<std::array<int, 4>> faces;
        for (const auto& f : mesh.faces) {
            bool ok = true;
            for (int c : f)
                if (!mesh.vertices[c].valid) ok = false;
            if (ok) faces.push_back(f);
        }
        const size_t expected = faces.size();
        export_obj(mesh, path);
        CHECK(count_lines_starting(path, "v ") == 8);
        CHECK(size_t(count_lines_starting(path, "f ")) == expected);
        // round trip: vertex count survives a re-read
        std::ifstream in(path);
        std::string line;
        int vcount = 0;
        double x, y, z;
        char c;
        while (std::getline(in, line)) {
            if (line.rfind("v ", 0) == 0) {
                std::istringstream is(line);
                is >> c >> x >> y >> z;
                CHECK(is.good() == false);  // consumed exactly three numbers
                ++vcount;
            }
        }
        CHECK(vcount == 8);
        std::remove(path.c_str());
        std::remove((path + ".tsv").c_str());
    }
    SUBCASE("sidecar lists every vertex with pivot and coordinates") {
        const SurfaceMesh mesh = sphere_mesh(0.5, 2, 3);
        export_obj(mesh, path);
        std::ifstream in(path + ".tsv");
        std::string header;
        std::getline(in, header);
        CHECK(header == "index\tvalidity\tpivot\tmetric\tx0\tx1\tx2\tx3\tx4");
        int rows = 0;
        std::string line;
        while (std::getline(in, line)) ++rows;
        CHECK(rows == 6);
        std::remove(path.c_str());
        std::remove((path + ".tsv").c_str());
    }
}

TEST_CASE("radial crossing probe finds the ideal boundary of the disk") {
    const Potential pot = sphere_potential();
    SampleOptions opts;
    opts.trunc = 6;
    opts.ode.tol = 1e-10;
    const auto crossings =
        radial_crossing_probe(pot, form_h3(), std::log(0.6), std::log(1.5), 41, opts);
    REQUIRE(crossings.size() == 1);
    CHECK(std::abs(crossings[0]) < 0.03);  // |z| = 1 is y = 0
}

TEST_CASE("run config") {
    SUBCASE("defaults are printable and complete") {
        RunConfig cfg;
        const std::string text = cfg.print();
        CHECK(text.find("trunc=64") != std::string::npos);
        CHECK(text.find("pivot_tol=1e-7") != std::string::npos);
        CHECK(text.find("tol_ode=1e-10") != std::string::npos);
    }
    SUBCASE("file parsing with comments and overrides") {
        const std::string path = "/tmp/loopcmc_test.cfg";
        {
            std::ofstream out(path);
            out << "# comment line\n"
                << "q = 3.5   # trailing comment\n"
                << "form= ads3\n\n";
        }
        RunConfig cfg;
        cfg.merge(RunConfig::from_file(path));
        CHECK(cfg.get_double("q") == doctest::Approx(3.5));
        CHECK(cfg.get("form") == "ads3");
        CHECK(cfg.get_int("trunc") == 64);  // untouched default
        cfg.set("q", "4");
        CHECK(cfg.get_int("q") == 4);
        std::remove(path.c_str());
    }
    SUBCASE("unknown key throws") {
        RunConfig cfg;
        CHECK_THROWS_AS(cfg.get("no_such_key"), std::out_of_range);
    }
}

TEST_CASE("run report") {
    RunReport rep;
    rep.section("closing");
    ClosingReport cr;
    cr.intrinsic = 1e-9;
    cr.extrinsic0 = {2e-9};
    cr.extrinsic1 = {3e-9};
    cr.extrinsic_sign = {-1};
    rep.closing(cr, 1e-7);
    rep.section("mesh");
    const SurfaceMesh mesh = sphere_mesh(0.5, 2, 3);
    rep.mesh_stats(mesh);
    const std::string text = rep.str();
    CHECK(text.find("[closing]") != std::string::npos);
    CHECK(text.find("extrinsic_sign_gen0: -1") != std::string::npos);
    CHECK(text.find("closes: yes") != std::string::npos);
    CHECK(text.find("mesh_hash:") != std::string::npos);
    CHECK(text.find("valid_vertices: 6") != std::string::npos);
}
