#pragma once

#include <array>
#include <string>
#include <vector>

#include "tripatch/polyline.hpp"

namespace tripatch {

/// 2D triangulation of the image rectangle [0,W]x[0,H]. Faces are positively
/// oriented (orient2d > 0) index triples; segments are the constrained edges.
struct Mesh2D {
    int width = 0;
    int height = 0;
    std::vector<Point2> vertices;
    std::vector<std::array<int, 2>> segments;
    std::vector<std::array<int, 3>> faces;

    std::size_t face_count() const { return faces.size(); }

    double face_area(std::size_t f) const {
        const Point2& a = vertices[faces[f][0]];
        const Point2& b = vertices[faces[f][1]];
        const Point2& c = vertices[faces[f][2]];
        return 0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
    }
};

/// {width, height, vertices:[[x,y],...], segments:[[i,j],...], faces:[[a,b,c],...]}
Mesh2D load_mesh_json(const std::string& path);
void save_mesh_json(const Mesh2D& mesh, const std::string& path);

} // namespace tripatch
