#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <string>

#include <json.hpp>

#include "support/oracle.hpp"
#include "support/scenes.hpp"
#include "support/temp_dir.hpp"
#include "tripatch/image_io.hpp"
#include "tripatch/intrinsics.hpp"
#include "tripatch/mesh2d.hpp"
#include "tripatch/metrics.hpp"
#include "tripatch/patch_cloud.hpp"

using namespace tripatch;

namespace {

int run_cli(const std::string& args, const std::string& log_path) {
    const std::string cmd =
        std::string(TRIPATCH_CLI_PATH) + " " + args + " >" + log_path + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Image2D step_image(int w, int h) {
    Image2D img(w, h, 1, 0.1);
    for (int y = 0; y < h; ++y)
        for (int x = w / 2; x < w; ++x) img.at(x, y) = 0.9;
    return img;
}

} // namespace

TEST_CASE("mesh subcommand writes a mesh JSON and reports counts") {
    testutil::TempDir dir;
    save_image_png(step_image(64, 48), dir.file("img.png"));
    const std::string log = dir.file("out.log");
    const int rc = run_cli("mesh --image " + dir.file("img.png") + " --out " + dir.file("m.json"),
                           log);
    CHECK(rc == 0);
    const std::string text = oracle::read_file(log);
    CHECK(text.find("vertices:") != std::string::npos);
    CHECK(text.find("faces:") != std::string::npos);
    const Mesh2D mesh = load_mesh_json(dir.file("m.json"));
    CHECK(mesh.width == 64);
    CHECK(mesh.faces.size() > 2); // the step edge adds constraints
}

TEST_CASE("mesh of a constant image is the two-face frame") {
    testutil::TempDir dir;
    save_image_png(Image2D(32, 32, 1, 0.5), dir.file("flat.png"));
    const int rc =
        run_cli("mesh --image " + dir.file("flat.png") + " --out " + dir.file("m.json"),
                dir.file("out.log"));
    CHECK(rc == 0);
    CHECK(load_mesh_json(dir.file("m.json")).faces.size() == 2);
}

TEST_CASE("missing input exits with code 1") {
    testutil::TempDir dir;
    const int rc = run_cli("mesh --image " + dir.file("absent.png") + " --out " +
                               dir.file("m.json"),
                           dir.file("out.log"));
    CHECK(rc == 1);
}

TEST_CASE("fit subcommand recovers a synthetic scene end to end") {
    testutil::TempDir dir;
    Polyline divider;
    divider.points = {{20.0, 0.0}, {44.0, 64.0}};
    const scenes::SplitScene s =
        scenes::make_split_scene(64, 64, divider, {0.05, -0.02, 0.5}, {-0.03, 0.04, 0.35});
    save_mesh_json(s.mesh, dir.file("mesh.json"));
    save_depth(s.gt_depth, dir.file("depth.png"), 0.0001);
    save_intrinsics(s.K, dir.file("K.json"));

    const int rc = run_cli("fit --mesh " + dir.file("mesh.json") + " --depth " +
                               dir.file("depth.png") + " --depth-scale 0.0001 --intrinsics " +
                               dir.file("K.json") + " --out " + dir.file("cloud.json") +
                               " --trace " + dir.file("trace.csv"),
                           dir.file("out.log"));
    CHECK(rc == 0);
    const std::string text = oracle::read_file(dir.file("out.log"));
    CHECK(text.find("L_depth:") != std::string::npos);
    const PatchCloud cloud = load_patch_cloud_json(dir.file("cloud.json"));
    CHECK(cloud.face_count() == s.mesh.faces.size());

    // final L_depth from the trace tail must be small (quantized GT)
    std::ifstream trace(dir.file("trace.csv"));
    std::string line, last;
    std::getline(trace, line); // header
    while (std::getline(trace, line))
        if (!line.empty()) last = line;
    const auto c2 = last.find(',', last.find(',') + 1);
    const double l_depth = std::stod(last.substr(c2 + 1));
    CHECK(l_depth < 1e-3);
}

TEST_CASE("lambda zero zeroes the normal-loss column") {
    testutil::TempDir dir;
    Polyline divider;
    divider.points = {{10.0, 0.0}, {22.0, 32.0}};
    const scenes::SplitScene s =
        scenes::make_split_scene(32, 32, divider, {0.02, -0.01, 0.5}, {-0.02, 0.03, 0.4});
    save_mesh_json(s.mesh, dir.file("mesh.json"));
    save_depth(s.gt_depth, dir.file("depth.png"), 0.0001);
    save_intrinsics(s.K, dir.file("K.json"));
    const int rc = run_cli("fit --mesh " + dir.file("mesh.json") + " --depth " +
                               dir.file("depth.png") + " --depth-scale 0.0001 --intrinsics " +
                               dir.file("K.json") + " --out " + dir.file("cloud.json") +
                               " --trace " + dir.file("trace.csv") +
                               " --lambda-n 0 --iterations 50",
                           dir.file("out.log"));
    CHECK(rc == 0);
    std::ifstream trace(dir.file("trace.csv"));
    std::string line;
    std::getline(trace, line);
    while (std::getline(trace, line)) {
        if (line.empty()) continue;
        CHECK(line.substr(line.rfind(',') + 1) == "0");
    }
}

TEST_CASE("fit rejects a depth map of the wrong size") {
    testutil::TempDir dir;
    Polyline divider;
    divider.points = {{10.0, 0.0}, {22.0, 32.0}};
    const scenes::SplitScene s =
        scenes::make_split_scene(32, 32, divider, {0.02, -0.01, 0.5}, {-0.02, 0.03, 0.4});
    save_mesh_json(s.mesh, dir.file("mesh.json"));
    DepthMap wrong(16, 16, 2.0);
    save_depth(wrong, dir.file("depth.png"), 0.001);
    save_intrinsics(s.K, dir.file("K.json"));
    const int rc = run_cli("fit --mesh " + dir.file("mesh.json") + " --depth " +
                               dir.file("depth.png") + " --intrinsics " + dir.file("K.json") +
                               " --out " + dir.file("cloud.json"),
                           dir.file("out.log"));
    CHECK(rc == 1);
}

TEST_CASE("eval of identical maps reports zeros and unit deltas") {
    testutil::TempDir dir;
    DepthMap d(16, 16);
    for (int i = 0; i < 256; ++i) d.data[i] = 1.0 + 0.01 * i;
    save_depth(d, dir.file("d.png"), 0.001);
    const int rc = run_cli("eval --pred " + dir.file("d.png") + " --gt " + dir.file("d.png") +
                               " --out " + dir.file("m.json"),
                           dir.file("out.log"));
    CHECK(rc == 0);
    nlohmann::json j;
    std::ifstream in(dir.file("m.json"));
    in >> j;
    CHECK(j["rel"].get<double>() == 0.0);
    CHECK(j["rms"].get<double>() == 0.0);
    CHECK(j["delta1"].get<double>() == 1.0);
    CHECK(j["n_valid"].get<std::size_t>() == 256);
}

TEST_CASE("eval with disjoint validity masks exits with code 1") {
    testutil::TempDir dir;
    DepthMap a(8, 8), b(8, 8);
    a.at(0, 0) = 1.0;
    b.at(7, 7) = 1.0;
    save_depth(a, dir.file("a.png"), 0.001);
    save_depth(b, dir.file("b.png"), 0.001);
    const int rc = run_cli("eval --pred " + dir.file("a.png") + " --gt " + dir.file("b.png") +
                               " --out " + dir.file("m.json"),
                           dir.file("out.log"));
    CHECK(rc == 1);
}

TEST_CASE("baseline on constant depth reproduces it where covered") {
    testutil::TempDir dir;
    DepthMap d(16, 16, 2.0);
    save_depth(d, dir.file("d.png"), 0.001);
    save_intrinsics({16.0, 16.0, 8.0, 8.0}, dir.file("K.json"));
    const int rc = run_cli("baseline --depth " + dir.file("d.png") + " --intrinsics " +
                               dir.file("K.json") + " --faces 8 --out " + dir.file("out.png") +
                               " --dump-obj " + dir.file("mesh"),
                           dir.file("out.log"));
    CHECK(rc == 0);
    const DepthMap out = load_depth(dir.file("out.png"), 0.001);
    std::size_t covered = 0;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        if (!(out.data[i] > 0.0)) continue;
        ++covered;
        CHECK(std::abs(out.data[i] - 2.0) < 1e-6);
    }
    CHECK(covered > 0);
    CHECK(oracle::read_obj(dir.file("mesh_dense.obj")).faces.size() == 450);
    CHECK(oracle::read_obj(dir.file("mesh_decimated.obj")).faces.size() <= 8);
}

TEST_CASE("render and export of a saved cloud write their artifacts") {
    testutil::TempDir dir;
    Polyline divider;
    divider.points = {{10.0, 0.0}, {22.0, 32.0}};
    const scenes::SplitScene s =
        scenes::make_split_scene(32, 32, divider, {0.02, -0.01, 0.5}, {-0.02, 0.03, 0.4});
    save_patch_cloud_json(s.gt_cloud, dir.file("cloud.json"));

    int rc = run_cli("render --patches " + dir.file("cloud.json") + " --out-depth " +
                         dir.file("d.png") + " --out-normals " + dir.file("n.png") +
                         " --depth-scale 0.0001",
                     dir.file("out.log"));
    CHECK(rc == 0);
    const DepthMap d = load_depth(dir.file("d.png"), 0.0001);
    CHECK(d.valid_count() == 32 * 32);
    const NormalMap n = load_normals_png(dir.file("n.png"));
    CHECK(n.valid(16, 16));

    rc = run_cli("export --patches " + dir.file("cloud.json") + " --out " + dir.file("c.obj"),
                 dir.file("out.log"));
    CHECK(rc == 0);
    CHECK(oracle::read_obj(dir.file("c.obj")).faces.size() == s.gt_cloud.face_count());
}

TEST_CASE("unknown depth-term value is rejected") {
    testutil::TempDir dir;
    DepthMap d(8, 8, 2.0);
    save_depth(d, dir.file("d.png"), 0.001);
    save_intrinsics({8, 8, 4, 4}, dir.file("K.json"));
    save_image_png(Image2D(8, 8, 1, 0.5), dir.file("i.png"));
    const int rc = run_cli("fit --image " + dir.file("i.png") + " --depth " + dir.file("d.png") +
                               " --intrinsics " + dir.file("K.json") + " --out " +
                               dir.file("c.json") + " --depth-term bogus",
                           dir.file("out.log"));
    CHECK(rc == 1);
}
