#pragma once

#include <cmath>
#include <string>

#include <json.hpp>

#include "tripatch/errors.hpp"
#include "tripatch/numeric.hpp"

namespace tripatch::detail {

// nlohmann's dump() uses shortest-round-trip float formatting; artifacts are
// instead pinned to fixed 17-significant-digit decimals so serialized bytes
// never depend on the library version. Object keys iterate sorted (std::map).
inline void dump_json_fixed(const nlohmann::json& j, std::string& out) {
    using nlohmann::json;
    switch (j.type()) {
    case json::value_t::object: {
        out += '{';
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out += ',';
            first = false;
            out += json(it.key()).dump();
            out += ':';
            dump_json_fixed(it.value(), out);
        }
        out += '}';
        break;
    }
    case json::value_t::array: {
        out += '[';
        bool first = true;
        for (const auto& v : j) {
            if (!first) out += ',';
            first = false;
            dump_json_fixed(v, out);
        }
        out += ']';
        break;
    }
    case json::value_t::number_float: {
        double v = j.get<double>();
        if (!std::isfinite(v)) throw invariant_error("JSON: non-finite number");
        out += format_g17(v);
        break;
    }
    default:
        out += j.dump();
    }
}

inline std::string dump_json_fixed(const nlohmann::json& j) {
    std::string out;
    dump_json_fixed(j, out);
    out += '\n';
    return out;
}

} // namespace tripatch::detail
