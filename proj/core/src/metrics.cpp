#include "tripatch/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <vector>

#include <json.hpp>

#include "json_fmt.hpp"
#include "tripatch/errors.hpp"
#include "tripatch/numeric.hpp"

namespace tripatch {

MetricsReport evaluate(const DepthMap& pred, const DepthMap& gt) {
    if (pred.width != gt.width || pred.height != gt.height)
        throw input_error("evaluate: dimension mismatch");

    std::vector<double> rel_terms, sq_terms, log_terms;
    std::size_t n_both = 0, n_gt = 0;
    std::size_t hits[3] = {0, 0, 0};
    const double thresholds[3] = {1.25, 1.25 * 1.25, 1.25 * 1.25 * 1.25};
    std::size_t pred_invalid = 0;

    for (std::size_t i = 0; i < gt.data.size(); ++i) {
        const double g = gt.data[i];
        if (!(g > 0.0)) continue;
        ++n_gt;
        const double p = pred.data[i];
        if (!(p > 0.0)) {
            ++pred_invalid; // delta failure; rel/rms see p = 0
            rel_terms.push_back(1.0);
            sq_terms.push_back(g * g);
            continue;
        }
        ++n_both;
        rel_terms.push_back(std::abs(p - g) / g);
        sq_terms.push_back((p - g) * (p - g));
        log_terms.push_back(std::abs(std::log10(p) - std::log10(g)));
        const double ratio = std::max(p / g, g / p);
        for (int k = 0; k < 3; ++k)
            if (ratio < thresholds[k]) ++hits[k];
    }
    if (n_both == 0) throw input_error("evaluate: no pixels valid in both maps");

    MetricsReport out;
    out.rel = pairwise_sum(rel_terms) / static_cast<double>(n_gt);
    out.rms = std::sqrt(pairwise_sum(sq_terms) / static_cast<double>(n_gt));
    out.log10 = pairwise_sum(log_terms) / static_cast<double>(n_both);
    out.delta1 = static_cast<double>(hits[0]) / static_cast<double>(n_gt);
    out.delta2 = static_cast<double>(hits[1]) / static_cast<double>(n_gt);
    out.delta3 = static_cast<double>(hits[2]) / static_cast<double>(n_gt);
    out.n_valid = n_both;
    out.n_pred_invalid = pred_invalid;
    return out;
}

std::size_t param_count(ParamKind kind, std::size_t size) {
    switch (kind) {
    case ParamKind::Pointcloud: return 3 * size; // x,y,z per pixel
    case ParamKind::Patchcloud: return 3 * size; // a,b,c per face
    }
    throw input_error("param_count: unknown kind");
}

std::string metrics_to_json(const MetricsReport& report) {
    nlohmann::json j;
    j["rel"] = report.rel;
    j["rms"] = report.rms;
    j["log10"] = report.log10;
    j["delta1"] = report.delta1;
    j["delta2"] = report.delta2;
    j["delta3"] = report.delta3;
    j["n_valid"] = report.n_valid;
    j["n_params"] = report.n_params;
    return detail::dump_json_fixed(j);
}

void save_metrics_json(const MetricsReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot write metrics file: " + path);
    out << metrics_to_json(report);
}

} // namespace tripatch
