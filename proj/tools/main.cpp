#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "tripatch/baseline.hpp"
#include "tripatch/canny.hpp"
#include "tripatch/cdt.hpp"
#include "tripatch/errors.hpp"
#include "tripatch/fit.hpp"
#include "tripatch/image_io.hpp"
#include "tripatch/metrics.hpp"
#include "tripatch/normals.hpp"
#include "tripatch/parallel.hpp"
#include "tripatch/render.hpp"

namespace {

using namespace tripatch;

struct EdgeFlags {
    double canny_sigma = 1.4;
    double canny_low = 0.1;
    double canny_high = 0.25;
    double simplify_eps = 2.0;
    double snap_eps = 1.0;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--canny-sigma", canny_sigma, "Gaussian sigma for Canny");
        cmd->add_option("--canny-low", canny_low, "Low hysteresis threshold (fraction of max)");
        cmd->add_option("--canny-high", canny_high, "High hysteresis threshold (fraction of max)");
        cmd->add_option("--simplify-eps", simplify_eps, "Polyline simplification tolerance (px)");
        cmd->add_option("--snap-eps", snap_eps, "Vertex snapping tolerance (px)");
    }
};

Mesh2D extract_mesh(const Image2D& img, const EdgeFlags& flags) {
    const EdgeMap edges = canny(img, flags.canny_sigma, flags.canny_low, flags.canny_high);
    std::vector<Polyline> chains = trace_polylines(edges);
    for (Polyline& p : chains) p = simplify_polyline(p, flags.simplify_eps);
    const Constraints constraints =
        build_constraints(chains, img.width, img.height, flags.snap_eps);
    return triangulate_cdt(constraints, img.width, img.height);
}

void print_metrics_row(const MetricsReport& m) {
    std::printf("rel     rms     log10   d1      d2      d3      n       #param\n");
    std::printf("%-7.4f %-7.4f %-7.4f %-7.4f %-7.4f %-7.4f %-7zu %zu\n", m.rel, m.rms, m.log10,
                m.delta1, m.delta2, m.delta3, m.n_valid, m.n_params);
}

int run(int argc, char** argv) {
    CLI::App app{"Triangular patch-cloud depth toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    int threads = 0;
    app.add_option("--threads", threads, "Worker threads (default: TRIPATCH_THREADS or all cores)");

    auto* mesh_cmd = app.add_subcommand("mesh", "Extract the adaptive 2D mesh from an image");
    std::string mesh_image, mesh_out;
    EdgeFlags mesh_flags;
    mesh_cmd->add_option("--image", mesh_image, "Input image (PNG/PGM/PPM)")->required();
    mesh_cmd->add_option("--out", mesh_out, "Output mesh JSON")->required();
    mesh_flags.add_to(mesh_cmd);

    auto* fit_cmd = app.add_subcommand("fit", "Fit patch parameters to a ground-truth depth map");
    std::string fit_image, fit_depth, fit_normals, fit_mesh, fit_intr, fit_out, fit_trace;
    EdgeFlags fit_flags;
    FitConfig fit_cfg;
    std::string fit_depth_term = "l1";
    double fit_scale = 0.001;
    fit_cmd->add_option("--image", fit_image, "Input image (used unless --mesh is given)");
    fit_cmd->add_option("--depth", fit_depth, "Ground-truth 16-bit depth map")->required();
    fit_cmd->add_option("--normals", fit_normals,
                        "Ground-truth normal PNG (default: derived from the depth map)");
    fit_cmd->add_option("--mesh", fit_mesh, "Reuse a mesh JSON instead of extracting one");
    fit_cmd->add_option("--intrinsics", fit_intr, "Camera intrinsics JSON")->required();
    fit_cmd->add_option("--out", fit_out, "Output patch-cloud JSON")->required();
    fit_cmd->add_option("--trace", fit_trace, "Loss trace CSV (default: <out>.trace.csv)");
    fit_cmd->add_option("--lambda-n", fit_cfg.lambda_n, "Normal loss weight");
    fit_cmd->add_option("--iterations", fit_cfg.iterations, "Descent iterations");
    fit_cmd->add_option("--step-size", fit_cfg.step_size, "Descent step size");
    fit_cmd->add_option("--init-depth", fit_cfg.init_depth, "Initial patch depth (m)");
    fit_cmd->add_option("--depth-term", fit_depth_term, "Depth term: l1 | signed-mean");
    fit_cmd->add_option("--depth-scale", fit_scale, "Meters per stored depth unit");
    fit_flags.add_to(fit_cmd);

    auto* render_cmd = app.add_subcommand("render", "Render a patch cloud to depth/normal maps");
    std::string render_patches, render_depth, render_normals;
    double render_scale = 0.001;
    render_cmd->add_option("--patches", render_patches, "Patch-cloud JSON")->required();
    render_cmd->add_option("--out-depth", render_depth, "Output 16-bit depth PNG");
    render_cmd->add_option("--out-normals", render_normals, "Output 8-bit normal PNG");
    render_cmd->add_option("--depth-scale", render_scale, "Meters per stored depth unit");

    auto* base_cmd = app.add_subcommand("baseline", "Grid mesh + decimation + re-render");
    std::string base_depth, base_intr, base_out, base_dump;
    std::size_t base_faces = 0;
    double base_scale = 0.001;
    base_cmd->add_option("--depth", base_depth, "Input 16-bit depth map")->required();
    base_cmd->add_option("--intrinsics", base_intr, "Camera intrinsics JSON")->required();
    base_cmd->add_option("--faces", base_faces, "Target face count")->required();
    base_cmd->add_option("--out", base_out, "Output rendered depth PNG")->required();
    base_cmd->add_option("--dump-obj", base_dump, "Prefix for dense/decimated OBJ dumps");
    base_cmd->add_option("--depth-scale", base_scale, "Meters per stored depth unit");

    auto* eval_cmd = app.add_subcommand("eval", "Depth metrics between two depth maps");
    std::string eval_pred, eval_gt, eval_out;
    double eval_scale = 0.001;
    std::size_t eval_params = 0;
    eval_cmd->add_option("--pred", eval_pred, "Predicted 16-bit depth map")->required();
    eval_cmd->add_option("--gt", eval_gt, "Ground-truth 16-bit depth map")->required();
    eval_cmd->add_option("--out", eval_out, "Output metrics JSON")->required();
    eval_cmd->add_option("--depth-scale", eval_scale, "Meters per stored depth unit");
    eval_cmd->add_option("--params", eval_params, "Parameter count to record in the report");

    auto* export_cmd = app.add_subcommand("export", "Export a patch cloud as Wavefront OBJ");
    std::string export_patches, export_out;
    export_cmd->add_option("--patches", export_patches, "Patch-cloud JSON")->required();
    export_cmd->add_option("--out", export_out, "Output OBJ path")->required();

    CLI11_PARSE(app, argc, argv);
    if (threads > 0) set_thread_count(threads);

    if (*mesh_cmd) {
        const Image2D img = load_image(mesh_image);
        const Mesh2D mesh = extract_mesh(img, mesh_flags);
        save_mesh_json(mesh, mesh_out);
        std::printf("vertices: %zu\nfaces: %zu\n", mesh.vertices.size(), mesh.faces.size());
    } else if (*fit_cmd) {
        if (fit_depth_term == "l1")
            fit_cfg.depth_term = DepthTerm::L1;
        else if (fit_depth_term == "signed-mean")
            fit_cfg.depth_term = DepthTerm::SignedMean;
        else
            throw input_error("fit: --depth-term must be l1 or signed-mean");
        const Intrinsics K = load_intrinsics(fit_intr);
        const DepthMap gt = load_depth(fit_depth, fit_scale);
        Mesh2D mesh;
        if (!fit_mesh.empty()) {
            mesh = load_mesh_json(fit_mesh);
        } else if (!fit_image.empty()) {
            const Image2D img = load_image(fit_image);
            mesh = extract_mesh(img, fit_flags);
        } else {
            throw input_error("fit: provide --image or --mesh");
        }
        if (mesh.width != gt.width || mesh.height != gt.height)
            throw input_error("fit: depth map size does not match the mesh frame");
        NormalMap gt_n;
        if (fit_cfg.lambda_n > 0.0)
            gt_n = fit_normals.empty() ? normals_from_depth(gt, K) : load_normals_png(fit_normals);
        const FitResult result = fit(mesh, gt, gt_n, K, fit_cfg);
        save_patch_cloud_json(result.cloud, fit_out);
        save_loss_trace_csv(result.trace, fit_trace.empty() ? fit_out + ".trace.csv" : fit_trace);
        const LossValue& last = result.trace.back();
        std::printf("faces: %zu\nL_depth: %.6g\nL_normal: %.6g\nL_sum: %.6g\n",
                    result.cloud.face_count(), last.depth, last.normal, last.sum);
    } else if (*render_cmd) {
        if (render_depth.empty() && render_normals.empty())
            throw input_error("render: nothing to do (use --out-depth / --out-normals)");
        const PatchCloud cloud = load_patch_cloud_json(render_patches);
        const PatchRender rendered = rasterize_patches(cloud);
        if (!render_depth.empty()) save_depth(rendered.depth, render_depth, render_scale);
        if (!render_normals.empty()) save_normals_png(rendered.normals, render_normals);
    } else if (*base_cmd) {
        const Intrinsics K = load_intrinsics(base_intr);
        const DepthMap depth = load_depth(base_depth, base_scale);
        std::pair<TriMesh3D, TriMesh3D> meshes;
        const DepthMap rendered = run_baseline(depth, K, base_faces, &meshes);
        save_depth(rendered, base_out, base_scale);
        if (!base_dump.empty()) {
            export_obj(meshes.first, base_dump + "_dense.obj");
            export_obj(meshes.second, base_dump + "_decimated.obj");
        }
        if (meshes.second.faces.size() > base_faces)
            std::fprintf(stderr, "warning: decimation stopped early at %zu faces\n",
                         meshes.second.faces.size());
        std::printf("faces: %zu\n", meshes.second.faces.size());
    } else if (*eval_cmd) {
        const DepthMap pred = load_depth(eval_pred, eval_scale);
        const DepthMap gt = load_depth(eval_gt, eval_scale);
        MetricsReport report = evaluate(pred, gt);
        report.n_params = eval_params;
        save_metrics_json(report, eval_out);
        if (report.n_pred_invalid > 0)
            std::fprintf(stderr, "warning: %zu pixels with valid GT had no prediction\n",
                         report.n_pred_invalid);
        print_metrics_row(report);
    } else if (*export_cmd) {
        const PatchCloud cloud = load_patch_cloud_json(export_patches);
        export_obj(cloud, export_out);
        std::printf("faces: %zu\n", cloud.face_count());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const invariant_error& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 2;
    } catch (const input_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
