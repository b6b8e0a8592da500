#include "eis/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "eis/errors.hpp"
#include "eis/spectro.hpp"
#include "json.hpp"

namespace eis {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string frame_csv(const Frame& frame) {
    std::string out = "omega,j,k,re_V,im_V\n";
    const std::string omega = format_g17(2.0 * kPi * frame.frequency);
    for (int j = 0; j < kNumElectrodes; ++j) {
        for (int k = 0; k < kNumElectrodes; ++k) {
            out += omega;
            out += ',' + std::to_string(j) + ',' + std::to_string(k);
            out += ',' + format_g17(frame.v[j][k].real());
            out += ',' + format_g17(frame.v[j][k].imag());
            out += '\n';
        }
    }
    return out;
}

std::string field_csv(const std::vector<Complex>& u) {
    std::string out = "node_id,re_u,im_u\n";
    for (std::size_t i = 0; i < u.size(); ++i) {
        out += std::to_string(i);
        out += ',' + format_g17(u[i].real()) + ',' + format_g17(u[i].imag()) + '\n';
    }
    return out;
}

std::string image_csv(const AdmittivityImage& image) {
    std::string out = "triangle_id,delta_sigma,delta_epsilon\n";
    for (std::size_t t = 0; t < image.delta_sigma.size(); ++t) {
        out += std::to_string(t);
        out += ',' + format_g17(image.delta_sigma[t]);
        out += ',' + format_g17(image.delta_epsilon[t]) + '\n';
    }
    return out;
}

std::string nodes_csv(const Mesh& mesh) {
    std::string out = "id,x,y\n";
    for (int i = 0; i < mesh.n_nodes(); ++i) {
        out += std::to_string(i);
        out += ',' + format_g17(mesh.nodes[i].x) + ',' + format_g17(mesh.nodes[i].y) + '\n';
    }
    return out;
}

std::string triangles_csv(const Mesh& mesh) {
    std::string out = "id,n1,n2,n3,region\n";
    for (int t = 0; t < mesh.n_tris(); ++t) {
        const MeshTri& tr = mesh.tris[t];
        out += std::to_string(t);
        for (int v : tr.v) out += ',' + std::to_string(v);
        out += ',' + std::to_string(tr.region) + '\n';
    }
    return out;
}

std::string electrodes_csv(const Mesh& mesh) {
    std::string out = "electrode_id,node_id,order\n";
    for (std::size_t e = 0; e < mesh.electrodes.size(); ++e) {
        for (std::size_t i = 0; i < mesh.electrodes[e].size(); ++i) {
            out += std::to_string(e);
            out += ',' + std::to_string(mesh.electrodes[e][i]) + ',' + std::to_string(i) + '\n';
        }
    }
    return out;
}

std::string contrast_table_csv(const Scene& scene, const std::vector<double>& frequencies_hz) {
    std::string out = "frequency_hz,re_lambda_c,im_lambda_c,re_lambda_d,im_lambda_d\n";
    for (double f : frequencies_hz) {
        const double omega = 2.0 * kPi * f;
        const Complex lc = lambda_c(scene.crack_material, scene.background, omega);
        const Complex ld = lambda_d(scene.bar_material, scene.background, omega);
        out += format_g17(f);
        out += ',' + format_g17(lc.real()) + ',' + format_g17(lc.imag());
        out += ',' + format_g17(ld.real()) + ',' + format_g17(ld.imag()) + '\n';
    }
    return out;
}

std::string pgm_raster(const Mesh& mesh, const std::vector<double>& tri_values) {
    if (static_cast<int>(tri_values.size()) != mesh.n_tris())
        throw ShapeMismatch("one value per mesh triangle expected");
    constexpr int kSize = 256;
    constexpr int kCells = 64;
    const double R = mesh.domain_radius;
    const double cell = 2.0 * R / kCells;

    // Bin triangles by bounding box for the pixel lookups.
    std::vector<std::vector<int>> bins(kCells * kCells);
    const auto cell_index = [&](double v) {
        int i = static_cast<int>(std::floor((v + R) / cell));
        return std::min(std::max(i, 0), kCells - 1);
    };
    for (int t = 0; t < mesh.n_tris(); ++t) {
        const MeshTri& tr = mesh.tris[t];
        double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
        for (int v : tr.v) {
            lo_x = std::min(lo_x, mesh.nodes[v].x);
            hi_x = std::max(hi_x, mesh.nodes[v].x);
            lo_y = std::min(lo_y, mesh.nodes[v].y);
            hi_y = std::max(hi_y, mesh.nodes[v].y);
        }
        for (int cy = cell_index(lo_y); cy <= cell_index(hi_y); ++cy)
            for (int cx = cell_index(lo_x); cx <= cell_index(hi_x); ++cx)
                bins[cy * kCells + cx].push_back(t);
    }

    double lo = 1e300, hi = -1e300;
    for (double v : tri_values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const bool flat = !(hi > lo);

    const auto contains = [&](int t, const Vec2& p) {
        const MeshTri& tr = mesh.tris[t];
        const Vec2& a = mesh.nodes[tr.v[0]];
        const Vec2& b = mesh.nodes[tr.v[1]];
        const Vec2& c = mesh.nodes[tr.v[2]];
        const double tol = -1e-12 * std::abs(cross(b - a, c - a));
        return cross(b - a, p - a) >= tol && cross(c - b, p - b) >= tol &&
               cross(a - c, p - c) >= tol;
    };

    std::string out = "P2\n# linear scale: ";
    out += format_g17(lo) + " -> 0, " + format_g17(hi) + " -> 255, outside domain -> 0\n";
    out += std::to_string(kSize) + ' ' + std::to_string(kSize) + "\n255\n";
    for (int row = 0; row < kSize; ++row) {
        const double y = R - (row + 0.5) * (2.0 * R / kSize);
        for (int col = 0; col < kSize; ++col) {
            const double x = -R + (col + 0.5) * (2.0 * R / kSize);
            int level = 0;
            if (x * x + y * y <= R * R) {
                const Vec2 p{x, y};
                for (int t : bins[cell_index(y) * kCells + cell_index(x)]) {
                    if (contains(t, p)) {
                        level = flat ? 0
                                     : static_cast<int>(
                                           std::lround(255.0 * (tri_values[t] - lo) / (hi - lo)));
                        break;
                    }
                }
            }
            if (col) out += ' ';
            out += std::to_string(level);
        }
        out += '\n';
    }
    return out;
}

std::string pole_report_json(const MeromorphicModel& model, double residual) {
    nlohmann::ordered_json j;
    j["cracks"] = nlohmann::ordered_json::array();
    for (const auto& t : model.cracks) {
        nlohmann::ordered_json e;
        e["P"] = {t.p.real(), t.p.imag()};
        e["Q"] = {t.q.real(), t.q.imag()};
        e["residue"] = {t.c.real(), t.c.imag()};
        j["cracks"].push_back(e);
    }
    j["bars"] = nlohmann::ordered_json::array();
    for (const auto& t : model.bars) {
        nlohmann::ordered_json e;
        e["z"] = {t.z.real(), t.z.imag()};
        e["strength"] = {t.d.real(), t.d.imag()};
        j["bars"].push_back(e);
    }
    j["residual"] = residual;
    return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw SolverError("cannot open " + path + " for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw SolverError("short write to " + path);
}

}  // namespace eis
