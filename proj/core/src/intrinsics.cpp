#include "tripatch/intrinsics.hpp"

#include <fstream>

#include <json.hpp>

#include "json_fmt.hpp"

namespace tripatch {

Intrinsics load_intrinsics(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open intrinsics file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw input_error("intrinsics JSON parse error: " + std::string(e.what()));
    }
    Intrinsics K;
    try {
        K.fx = j.at("fx").get<double>();
        K.fy = j.at("fy").get<double>();
        K.cx = j.at("cx").get<double>();
        K.cy = j.at("cy").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw input_error("intrinsics JSON missing field: " + std::string(e.what()));
    }
    K.validate();
    return K;
}

void save_intrinsics(const Intrinsics& K, const std::string& path) {
    nlohmann::json j{{"fx", K.fx}, {"fy", K.fy}, {"cx", K.cx}, {"cy", K.cy}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot write intrinsics file: " + path);
    out << detail::dump_json_fixed(j);
}

} // namespace tripatch
