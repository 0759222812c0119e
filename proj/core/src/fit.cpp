#include "tripatch/fit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "tripatch/errors.hpp"
#include "tripatch/numeric.hpp"
#include "tripatch/parallel.hpp"
#include "tripatch/render.hpp"

namespace tripatch {

namespace {

constexpr double kMinInvDepth = 1e-3; // corner projection floor (depth <= 1000 m)
constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

struct Workspace {
    FaceIdMap ids;
    std::vector<std::vector<int32_t>> region; // face -> gt-valid pixels, row-major
    std::vector<Vec3> normal_sum;             // per-face sum of valid GT normals
    std::size_t n = 0;                        // pixels valid in both gt and render
};

Workspace build_workspace(const PatchCloud& cloud, const DepthMap& gt_depth,
                          const NormalMap& gt_normals, const FitConfig& cfg) {
    if (gt_depth.width != cloud.width || gt_depth.height != cloud.height)
        throw input_error("loss: depth map dimensions do not match the cloud");
    if (cfg.lambda_n > 0.0 &&
        (gt_normals.width != cloud.width || gt_normals.height != cloud.height))
        throw input_error("loss: normal map dimensions do not match the cloud");

    Workspace ws{face_id_map(cloud), {}, {}, 0};
    ws.region.resize(cloud.faces.size());
    for (int y = 0; y < cloud.height; ++y)
        for (int x = 0; x < cloud.width; ++x) {
            if (!gt_depth.valid(x, y)) continue;
            const int32_t f = ws.ids.at(x, y);
            if (f < 0) continue;
            ws.region[f].push_back(static_cast<int32_t>(y * cloud.width + x));
            ++ws.n;
        }
    if (ws.n == 0) throw input_error("loss: no pixels valid in both maps");

    if (cfg.lambda_n > 0.0) {
        ws.normal_sum.assign(cloud.faces.size(), Vec3{});
        for (std::size_t f = 0; f < ws.region.size(); ++f)
            for (int32_t pix : ws.region[f])
                ws.normal_sum[f] += gt_normals.data[pix]; // invalid = zero vector
    }
    return ws;
}

struct FaceEval {
    double depth_sum = 0.0;  // sum_i |r_i| or r_i
    double normal_dot = 0.0; // N_face . sum_i N*_i
    std::array<double, 3> grad{0.0, 0.0, 0.0};
};

/// Loss partials and the exact gradient of one face at its current params.
FaceEval eval_face(const PatchCloud& cloud, const DepthMap& gt_depth, const Workspace& ws,
                   const FitConfig& cfg, std::size_t f) {
    FaceEval out;
    const auto& [a, b, c] = cloud.faces[f].abc;
    const Intrinsics& K = cloud.intrinsics;
    const double inv_n = 1.0 / static_cast<double>(ws.n);

    for (int32_t pix : ws.region[f]) {
        const int x = pix % cloud.width, y = pix / cloud.width;
        const double u = K.u(x + 0.5), v = K.v(y + 0.5);
        const double s = a * u + b * v + c;
        const double depth = 1.0 / s;
        const double r = depth - gt_depth.data[pix];
        double factor;
        if (cfg.depth_term == DepthTerm::L1) {
            out.depth_sum += std::abs(r);
            factor = r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0);
        } else {
            out.depth_sum += r;
            factor = 1.0;
        }
        const double scale = factor * inv_n / (s * s);
        out.grad[0] -= scale * u;
        out.grad[1] -= scale * v;
        out.grad[2] -= scale;
    }

    if (cfg.lambda_n > 0.0 && !ws.region[f].empty()) {
        const Vec3 S = ws.normal_sum[f];
        const Vec3 p{a, b, c};
        const double len = norm(p);
        const double pdotS = dot(p, S);
        out.normal_dot = -pdotS / len; // N = -p/|p|
        // d/dp of (p.S)/|p|, weighted by lambda_n / n.
        const double w = cfg.lambda_n * inv_n;
        const Vec3 g = S / len - p * (pdotS / (len * len * len));
        out.grad[0] += w * g.x;
        out.grad[1] += w * g.y;
        out.grad[2] += w * g.z;
    }
    return out;
}

/// A face's additive share of n * L_sum.
double face_objective(const FaceEval& e, const FitConfig& cfg) {
    return e.depth_sum - cfg.lambda_n * e.normal_dot;
}

LossValue reduce_loss(const std::vector<FaceEval>& evals, std::size_t n, const FitConfig& cfg) {
    double depth = 0.0, ndot = 0.0;
    for (const FaceEval& e : evals) {
        depth += e.depth_sum;
        ndot += e.normal_dot;
    }
    LossValue out;
    out.depth = depth / static_cast<double>(n);
    out.normal = cfg.lambda_n > 0.0 ? -ndot / static_cast<double>(n) : 0.0;
    out.sum = out.depth + cfg.lambda_n * out.normal;
    return out;
}

/// Largest step fraction keeping corner inverse depths >= kMinInvDepth.
double projection_scale(const PatchCloud& cloud, std::size_t f,
                        const std::array<double, 3>& delta) {
    const Intrinsics& K = cloud.intrinsics;
    const auto& [a, b, c] = cloud.faces[f].abc;
    double t = 1.0;
    for (const Point2& corner : cloud.faces[f].tri) {
        const double u = K.u(corner.x), v = K.v(corner.y);
        const double s_old = a * u + b * v + c;
        const double ds = delta[0] * u + delta[1] * v + delta[2];
        if (s_old + ds >= kMinInvDepth) continue;
        if (ds >= 0.0) continue; // already at the floor and moving up
        t = std::min(t, std::max(0.0, (s_old - kMinInvDepth) / -ds));
    }
    return t;
}

} // namespace

void FitConfig::validate() const {
    if (lambda_n < 0.0) throw input_error("FitConfig: lambda_n must be >= 0");
    if (iterations < 1) throw input_error("FitConfig: iterations must be >= 1");
    if (!(step_size > 0.0)) throw input_error("FitConfig: step_size must be > 0");
    if (!(init_depth > 0.0) || init_depth > 1.0 / kMinInvDepth)
        throw input_error("FitConfig: init_depth must be in (0, 1000] m");
}

LossValue loss(const PatchCloud& cloud, const DepthMap& gt_depth, const NormalMap& gt_normals,
               const FitConfig& cfg) {
    cfg.validate();
    const PatchRender render = rasterize_patches(cloud);
    if (gt_depth.width != cloud.width || gt_depth.height != cloud.height)
        throw input_error("loss: depth map dimensions do not match the cloud");
    if (cfg.lambda_n > 0.0 &&
        (gt_normals.width != cloud.width || gt_normals.height != cloud.height))
        throw input_error("loss: normal map dimensions do not match the cloud");

    std::size_t n = 0;
    double depth_sum = 0.0, normal_dot = 0.0;
    for (std::size_t i = 0; i < gt_depth.data.size(); ++i) {
        if (!(gt_depth.data[i] > 0.0) || !(render.depth.data[i] > 0.0)) continue;
        ++n;
        const double r = render.depth.data[i] - gt_depth.data[i];
        depth_sum += cfg.depth_term == DepthTerm::L1 ? std::abs(r) : r;
        if (cfg.lambda_n > 0.0) normal_dot += dot(render.normals.data[i], gt_normals.data[i]);
    }
    if (n == 0) throw input_error("loss: no pixels valid in both maps");
    LossValue out;
    out.depth = depth_sum / static_cast<double>(n);
    out.normal = cfg.lambda_n > 0.0 ? -normal_dot / static_cast<double>(n) : 0.0;
    out.sum = out.depth + cfg.lambda_n * out.normal;
    return out;
}

std::vector<std::array<double, 3>> loss_gradient(const PatchCloud& cloud,
                                                 const DepthMap& gt_depth,
                                                 const NormalMap& gt_normals,
                                                 const FitConfig& cfg) {
    cfg.validate();
    cloud.validate();
    const Workspace ws = build_workspace(cloud, gt_depth, gt_normals, cfg);
    std::vector<std::array<double, 3>> grad(cloud.faces.size(), {0.0, 0.0, 0.0});
    parallel_for(cloud.faces.size(), [&](std::size_t f) {
        grad[f] = eval_face(cloud, gt_depth, ws, cfg, f).grad;
    });
    return grad;
}

FitResult fit(const Mesh2D& mesh, const DepthMap& gt_depth, const NormalMap& gt_normals,
              const Intrinsics& K, const FitConfig& cfg, const std::vector<uint8_t>* active) {
    cfg.validate();
    if (active && active->size() != mesh.faces.size())
        throw input_error("fit: active mask size does not match the mesh");

    FitResult result;
    result.cloud = detach_faces(mesh, K, cfg.init_depth);
    PatchCloud& cloud = result.cloud;
    const Workspace ws = build_workspace(cloud, gt_depth, gt_normals, cfg);

    const std::size_t m_faces = cloud.faces.size();
    std::vector<std::array<double, 3>> adam_m(m_faces, {0.0, 0.0, 0.0});
    std::vector<std::array<double, 3>> adam_v(m_faces, {0.0, 0.0, 0.0});
    std::vector<FaceEval> evals(m_faces);

    const int T = cfg.iterations;
    for (int t = 1; t <= T; ++t) {
        // Exponential decay to 1% of the base step over the run; the L1
        // endgame oscillates at the step scale, so the floor sets the
        // achievable residual.
        const double lr =
            cfg.step_size * std::pow(0.01, T > 1 ? (t - 1) / static_cast<double>(T - 1) : 0.0);
        const double bc1 = 1.0 - std::pow(kAdamBeta1, t);
        const double bc2 = 1.0 - std::pow(kAdamBeta2, t);
        parallel_for(m_faces, [&](std::size_t f) {
            evals[f] = eval_face(cloud, gt_depth, ws, cfg, f);
            if (active && !(*active)[f]) return;
            if (ws.region[f].empty()) return;
            std::array<double, 3> delta;
            for (int k = 0; k < 3; ++k) {
                const double g = evals[f].grad[k];
                adam_m[f][k] = kAdamBeta1 * adam_m[f][k] + (1.0 - kAdamBeta1) * g;
                adam_v[f][k] = kAdamBeta2 * adam_v[f][k] + (1.0 - kAdamBeta2) * g * g;
                const double mh = adam_m[f][k] / bc1;
                const double vh = adam_v[f][k] / bc2;
                delta[k] = -lr * mh / (std::sqrt(vh) + kAdamEps);
            }
            // Backtrack until the step is feasible and the face objective
            // does not increase; skip the update when no scale helps (the
            // L1 optimum sits on a kink).
            const std::array<double, 3> before_abc = cloud.faces[f].abc;
            const double before = face_objective(evals[f], cfg);
            double scale = projection_scale(cloud, f, delta);
            for (int guard = 0; guard < 8 && scale > 0.0; ++guard) {
                std::array<double, 3> trial = before_abc;
                for (int k = 0; k < 3; ++k) trial[k] += scale * delta[k];
                bool feasible = true;
                for (const Point2& corner : cloud.faces[f].tri) {
                    const double s = trial[0] * cloud.intrinsics.u(corner.x) +
                                     trial[1] * cloud.intrinsics.v(corner.y) + trial[2];
                    if (s < kMinInvDepth) {
                        feasible = false;
                        break;
                    }
                }
                if (feasible) {
                    cloud.faces[f].abc = trial;
                    if (face_objective(eval_face(cloud, gt_depth, ws, cfg, f), cfg) <= before)
                        return;
                    cloud.faces[f].abc = before_abc;
                }
                scale *= 0.5;
            }
        });
        result.trace.push_back(reduce_loss(evals, ws.n, cfg));
    }
    parallel_for(m_faces, [&](std::size_t f) {
        evals[f] = eval_face(cloud, gt_depth, ws, cfg, f);
    });
    result.trace.push_back(reduce_loss(evals, ws.n, cfg));
    return result;
}

void save_loss_trace_csv(const std::vector<LossValue>& trace, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot write trace file: " + path);
    out << "iteration,L_sum,L_depth,L_normal\n";
    for (std::size_t i = 0; i < trace.size(); ++i)
        out << i << ',' << format_g17(trace[i].sum) << ',' << format_g17(trace[i].depth) << ','
            << format_g17(trace[i].normal) << '\n';
    if (!out) throw input_error("trace write failed: " + path);
}

} // namespace tripatch
