#include "tripatch/mesh2d.hpp"

#include <fstream>

#include <json.hpp>

#include "json_fmt.hpp"
#include "tripatch/errors.hpp"

namespace tripatch {

Mesh2D load_mesh_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open mesh file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw input_error("mesh JSON parse error: " + std::string(e.what()));
    }
    Mesh2D mesh;
    try {
        mesh.width = j.at("width").get<int>();
        mesh.height = j.at("height").get<int>();
        for (const auto& v : j.at("vertices"))
            mesh.vertices.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
        for (const auto& s : j.at("segments"))
            mesh.segments.push_back({s.at(0).get<int>(), s.at(1).get<int>()});
        for (const auto& f : j.at("faces"))
            mesh.faces.push_back({f.at(0).get<int>(), f.at(1).get<int>(), f.at(2).get<int>()});
    } catch (const nlohmann::json::exception& e) {
        throw input_error("mesh JSON schema error: " + std::string(e.what()));
    }
    const int n = static_cast<int>(mesh.vertices.size());
    for (const auto& s : mesh.segments)
        if (s[0] < 0 || s[0] >= n || s[1] < 0 || s[1] >= n)
            throw input_error("mesh JSON: segment index out of range");
    for (const auto& f : mesh.faces)
        for (int i : f)
            if (i < 0 || i >= n) throw input_error("mesh JSON: face index out of range");
    return mesh;
}

void save_mesh_json(const Mesh2D& mesh, const std::string& path) {
    nlohmann::json j;
    j["width"] = mesh.width;
    j["height"] = mesh.height;
    auto& verts = j["vertices"] = nlohmann::json::array();
    for (const Point2& v : mesh.vertices) verts.push_back({v.x, v.y});
    auto& segs = j["segments"] = nlohmann::json::array();
    for (const auto& s : mesh.segments) segs.push_back({s[0], s[1]});
    auto& faces = j["faces"] = nlohmann::json::array();
    for (const auto& f : mesh.faces) faces.push_back({f[0], f[1], f[2]});
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot write mesh file: " + path);
    out << detail::dump_json_fixed(j);
}

} // namespace tripatch
