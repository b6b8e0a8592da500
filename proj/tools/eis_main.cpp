#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "eis/asymptotics.hpp"
#include "eis/errors.hpp"
#include "eis/forward.hpp"
#include "eis/io.hpp"
#include "eis/mesh.hpp"
#include "eis/reconstruct.hpp"
#include "eis/scene.hpp"
#include "eis/spectro.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using eis::Complex;

namespace {

struct RunConfig {
    eis::Scene scene;
    bool has_scene = false;
    eis::MeshOptions mesh;
    std::vector<double> frequencies{10.0, 100.0, 1e4, 2.5e5, 5e5, 8e5};
    double alpha_rel = 1e-4;
    std::string out_dir = "out";
    bool coarse_inverse = true;
    double coarse_h = 0.0;  // 0 picks R/10
    double locate_freq = 8e5;
    double locate_drive_deg = 30.0;
    bool check_reciprocity = false;
    bool use_tsvd = false;
    int tsvd_rank = 48;
};

struct CliFlags {
    std::string config_path;
    std::string out_dir;
    int model = 0;
    std::string freqs_csv;
    double alpha_rel = 0.0;
    bool coarse = true;
    bool check_reciprocity = false;
    double target_h = 0.0;
    bool strips = false;
    double coarse_h = 0.0;
    double locate_freq = 0.0;
    double drive_deg = 0.0;
    bool tsvd = false;
    int tsvd_rank = 0;
};

std::vector<double> parse_freq_list(const std::string& text) {
    std::vector<double> out;
    std::string item;
    std::istringstream is(text);
    while (std::getline(is, item, ',')) {
        try {
            std::size_t used = 0;
            const double v = std::stod(item, &used);
            while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used])))
                ++used;
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw eis::ParseError("bad frequency entry '" + item + "'");
        }
    }
    return out;
}

RunConfig load_config(const CLI::App* sub, const CliFlags& fl) {
    RunConfig cfg;
    cfg.mesh.resolve_crack_strips = false;  // interface model keeps budgets sane
    if (!fl.config_path.empty()) {
        std::ifstream f(fl.config_path);
        if (!f) throw eis::ParseError("cannot read config " + fl.config_path);
        std::stringstream ss;
        ss << f.rdbuf();
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(ss.str());
        } catch (const nlohmann::json::exception& e) {
            throw eis::ParseError(std::string("config json: ") + e.what());
        }
        try {
            if (j.contains("model")) {
                cfg.scene = eis::builtin_model(j.at("model").get<int>());
                cfg.has_scene = true;
            }
            if (j.contains("scene")) {
                cfg.scene = eis::scene_from_json(j.at("scene").dump());
                cfg.has_scene = true;
            }
            if (j.contains("mesh")) {
                const auto& m = j.at("mesh");
                cfg.mesh.target_h = m.value("target_h", cfg.mesh.target_h);
                cfg.mesh.electrode_coverage =
                    m.value("electrode_coverage", cfg.mesh.electrode_coverage);
                cfg.mesh.element_cap = m.value("element_cap", cfg.mesh.element_cap);
                cfg.mesh.resolve_crack_strips =
                    m.value("resolve_crack_strips", cfg.mesh.resolve_crack_strips);
                cfg.mesh.interface_spacing =
                    m.value("interface_spacing", cfg.mesh.interface_spacing);
            }
            if (j.contains("frequencies_hz"))
                cfg.frequencies = j.at("frequencies_hz").get<std::vector<double>>();
            cfg.alpha_rel = j.value("alpha_rel", cfg.alpha_rel);
            cfg.out_dir = j.value("output_dir", cfg.out_dir);
            cfg.coarse_inverse = j.value("coarse_inverse", cfg.coarse_inverse);
            cfg.coarse_h = j.value("coarse_h", cfg.coarse_h);
            if (j.contains("locate")) {
                cfg.locate_freq = j.at("locate").value("frequency_hz", cfg.locate_freq);
                cfg.locate_drive_deg = j.at("locate").value("drive_deg", cfg.locate_drive_deg);
            }
            if (j.contains("tsvd")) {
                cfg.use_tsvd = j.at("tsvd").value("enabled", false);
                cfg.tsvd_rank = j.at("tsvd").value("rank", cfg.tsvd_rank);
            }
        } catch (const nlohmann::json::exception& e) {
            throw eis::ParseError(std::string("config json: ") + e.what());
        }
    }
    if (sub->count("--model")) {
        cfg.scene = eis::builtin_model(fl.model);
        cfg.has_scene = true;
    }
    if (sub->count("--out")) cfg.out_dir = fl.out_dir;
    if (sub->count("--freqs")) cfg.frequencies = parse_freq_list(fl.freqs_csv);
    if (sub->count("--alpha-rel")) cfg.alpha_rel = fl.alpha_rel;
    if (sub->count("--coarse-inverse")) cfg.coarse_inverse = fl.coarse;
    if (sub->count("--check-reciprocity")) cfg.check_reciprocity = true;
    if (sub->count("--target-h")) cfg.mesh.target_h = fl.target_h;
    if (sub->count("--strips")) cfg.mesh.resolve_crack_strips = true;
    if (sub->count("--coarse-h")) cfg.coarse_h = fl.coarse_h;
    if (sub->count("--freq")) cfg.locate_freq = fl.locate_freq;
    if (sub->count("--drive-deg")) cfg.locate_drive_deg = fl.drive_deg;
    if (sub->count("--tsvd")) cfg.use_tsvd = true;
    if (sub->count("--tsvd-rank")) cfg.tsvd_rank = fl.tsvd_rank;

    if (cfg.frequencies.empty()) throw eis::ParseError("frequency list is empty");
    for (double f : cfg.frequencies)
        if (!(f >= 0.0 && f <= 1e6))
            throw eis::ParseError("frequency outside [0, 1e6] Hz: " + eis::format_g17(f));
    return cfg;
}

const eis::Scene& need_scene(const RunConfig& cfg) {
    if (!cfg.has_scene)
        throw eis::ParseError("no scene configured: pass --model or a config with scene/model");
    return cfg.scene;
}

int cmd_validate(const RunConfig& cfg) {
    const eis::SeparationReport rep = eis::validate_scene(need_scene(cfg));
    std::cout << "crack_crack," << eis::format_g17(rep.crack_crack) << "\n"
              << "crack_bar," << eis::format_g17(rep.crack_bar) << "\n"
              << "bar_bar," << eis::format_g17(rep.bar_bar) << "\n"
              << "crack_boundary," << eis::format_g17(rep.crack_boundary) << "\n"
              << "bar_boundary," << eis::format_g17(rep.bar_boundary) << "\n"
              << "valid\n";
    return 0;
}

int cmd_forward(const RunConfig& cfg) {
    const eis::Scene& scene = need_scene(cfg);
    const eis::Mesh mesh = eis::build_mesh(scene, cfg.mesh);
    fs::create_directories(cfg.out_dir);
    eis::ForwardOptions fo;
    fo.shunt_electrodes = true;
    bool reciprocity_ok = true;
    for (double f : cfg.frequencies) {
        eis::ForwardSolver solver(mesh, scene, 2.0 * eis::kPi * f, fo);
        const eis::Frame frame = solver.measure_frame();
        if (cfg.check_reciprocity) {
            const double rel = eis::reciprocity_defect(frame) / eis::frame_max(frame);
            std::cout << "reciprocity_rel," << eis::format_g17(f) << ','
                      << eis::format_g17(rel) << "\n";
            if (!(rel <= 1e-8)) reciprocity_ok = false;
        }
        const std::string name = "frame_" + eis::format_g17(f) + ".csv";
        eis::write_text_file((fs::path(cfg.out_dir) / name).string(), eis::frame_csv(frame));
        std::cout << "wrote " << name << "\n";
    }
    if (!reciprocity_ok) {
        std::cerr << "reciprocity check failed\n";
        return 3;
    }
    return 0;
}

int cmd_sweep(const RunConfig& cfg) {
    const eis::Scene& scene = need_scene(cfg);
    const eis::Mesh data_mesh = eis::build_mesh(scene, cfg.mesh);
    eis::Mesh inverse_mesh;
    eis::SweepOptions so;
    so.recon.alpha_rel = cfg.alpha_rel;
    so.recon.use_tsvd = cfg.use_tsvd;
    so.recon.tsvd_rank = cfg.tsvd_rank;
    if (cfg.coarse_inverse) {
        eis::MeshOptions im;
        im.target_h = cfg.coarse_h > 0.0 ? cfg.coarse_h : scene.domain_radius / 10.0;
        inverse_mesh = eis::build_mesh(eis::without_defects(scene), im);
        so.inverse_mesh = &inverse_mesh;
    }
    const auto images = eis::sweep(scene, data_mesh, cfg.frequencies, so);
    const eis::Mesh& image_mesh = cfg.coarse_inverse ? inverse_mesh : data_mesh;

    fs::create_directories(cfg.out_dir);
    nlohmann::ordered_json index;
    index["command"] = "sweep";
    index["frequencies_hz"] = cfg.frequencies;
    index["alpha_rel"] = cfg.alpha_rel;
    index["tsvd"] = cfg.use_tsvd;
    index["coarse_inverse"] = cfg.coarse_inverse;
    index["image_triangles"] = image_mesh.n_tris();
    index["entries"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < images.size(); ++i) {
        const std::string sfx = eis::format_g17(cfg.frequencies[i]);
        const std::string csv_name = "image_" + sfx + ".csv";
        const std::string sig_name = "sigma_" + sfx + ".pgm";
        const std::string eps_name = "epsilon_" + sfx + ".pgm";
        eis::write_text_file((fs::path(cfg.out_dir) / csv_name).string(),
                             eis::image_csv(images[i]));
        eis::write_text_file((fs::path(cfg.out_dir) / sig_name).string(),
                             eis::pgm_raster(image_mesh, images[i].delta_sigma));
        eis::write_text_file((fs::path(cfg.out_dir) / eps_name).string(),
                             eis::pgm_raster(image_mesh, images[i].delta_epsilon));
        const eis::VisibilityScores vis = eis::visibility(images[i], scene, image_mesh);
        nlohmann::ordered_json entry;
        entry["frequency_hz"] = cfg.frequencies[i];
        entry["image_csv"] = csv_name;
        entry["sigma_pgm"] = sig_name;
        entry["epsilon_pgm"] = eps_name;
        entry["visibility"] = {{"crack", vis.crack},
                               {"bar", vis.bar},
                               {"background_median", vis.background_median}};
        index["entries"].push_back(entry);
        std::cout << "wrote " << csv_name << "\n";
    }
    eis::write_text_file((fs::path(cfg.out_dir) / "index.json").string(),
                         index.dump(2) + "\n");
    std::cout << "wrote index.json\n";
    return 0;
}

int cmd_locate(const RunConfig& cfg) {
    const eis::Scene& scene = need_scene(cfg);
    fs::create_directories(cfg.out_dir);
    const std::string report_path = (fs::path(cfg.out_dir) / "locate_report.json").string();
    const int nc = static_cast<int>(scene.cracks.size());
    const int nb = static_cast<int>(scene.bars.size());
    if (nc + nb == 0) {
        eis::write_text_file(report_path, eis::pole_report_json({}, 0.0));
        std::cout << "wrote locate_report.json\n";
        return 0;
    }

    // Moment extraction amplifies rim discretization error, so probing wants a
    // finer mesh than imaging does.
    eis::MeshOptions mo = cfg.mesh;
    if (mo.target_h <= 0.0) mo.target_h = scene.domain_radius / 60.0;
    const eis::Mesh mesh = eis::build_mesh(scene, mo);
    const double omega = 2.0 * eis::kPi * cfg.locate_freq;
    const double rad = cfg.locate_drive_deg * eis::kPi / 180.0;
    const eis::Vec2 a{std::cos(rad), std::sin(rad)};
    eis::ForwardSolver defect(mesh, scene, omega);
    eis::ForwardOptions ho;
    ho.homogenize = true;
    eis::ForwardSolver homog(mesh, scene, omega, ho);
    const auto w = eis::boundary_perturbation(mesh, defect.solve_continuous(a),
                                              homog.solve_continuous(a),
                                              defect.gamma_background());

    eis::BoundarySamples samples;
    samples.radius = mesh.domain_radius;
    samples.theta = eis::rim_angles(mesh);
    samples.values.reserve(w.size());
    for (const Complex& v : w) samples.values.push_back(v.real());

    const eis::MeromorphicModel model = eis::recover_terms(samples, nc, nb);

    // Relative misfit of the recovered terms against the data moments.
    const int K = 4 * (2 * nc + 2 * nb);
    const auto mom = eis::harmonic_moments(samples, K);
    const double R = mesh.domain_radius;
    double num = 0.0, den = 0.0;
    for (int n = 1; n <= K; ++n) {
        Complex pred{0.0, 0.0};
        for (const auto& t : model.cracks)
            pred += t.c * (std::pow(t.q / R, n) - std::pow(t.p / R, n));
        for (const auto& t : model.bars)
            pred += (-t.d / R) * static_cast<double>(n) * std::pow(t.z / R, n - 1);
        num += std::norm(mom[n - 1] - pred);
        den += std::norm(mom[n - 1]);
    }
    const double residual = den > 0.0 ? std::sqrt(num / den) : 0.0;

    eis::write_text_file(report_path, eis::pole_report_json(model, residual));
    std::cout << "wrote locate_report.json\n";
    return 0;
}

int cmd_spectro_dump(const RunConfig& cfg) {
    const eis::Scene scene = cfg.has_scene ? cfg.scene : eis::Scene{};
    fs::create_directories(cfg.out_dir);
    eis::write_text_file((fs::path(cfg.out_dir) / "contrast_table.csv").string(),
                         eis::contrast_table_csv(scene, cfg.frequencies));
    std::cout << "wrote contrast_table.csv\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"disk phantom impedance toolkit"};
    app.require_subcommand(1);
    CliFlags fl;
    const auto wire = [&fl](CLI::App* sub) {
        sub->add_option("--config", fl.config_path, "JSON run config path");
        sub->add_option("--out", fl.out_dir, "output directory");
        sub->add_option("--model", fl.model, "built-in scene number");
        sub->add_option("--freqs", fl.freqs_csv, "comma separated frequencies in Hz");
        sub->add_option("--alpha-rel", fl.alpha_rel, "relative Tikhonov weight");
        sub->add_flag("--coarse-inverse,!--no-coarse-inverse", fl.coarse,
                      "reconstruct on a coarser defect-free mesh");
        sub->add_flag("--check-reciprocity", fl.check_reciprocity,
                      "report frame reciprocity defects");
        sub->add_option("--target-h", fl.target_h, "mesh edge target");
        sub->add_flag("--strips", fl.strips, "mesh crack strips at true thickness");
        sub->add_option("--coarse-h", fl.coarse_h, "inverse mesh edge target");
        sub->add_option("--freq", fl.locate_freq, "probing frequency in Hz");
        sub->add_option("--drive-deg", fl.drive_deg, "boundary drive direction in degrees");
        sub->add_flag("--tsvd", fl.tsvd, "truncated SVD instead of Tikhonov");
        sub->add_option("--tsvd-rank", fl.tsvd_rank, "singular values kept");
    };
    wire(app.add_subcommand("validate", "check a scene configuration"));
    wire(app.add_subcommand("forward", "write voltage frames per frequency"));
    wire(app.add_subcommand("sweep", "reconstruct admittivity images per frequency"));
    wire(app.add_subcommand("locate", "recover defect poles from rim data"));
    wire(app.add_subcommand("spectro-dump", "tabulate contrast scalars over frequency"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    const CLI::App* sub = app.get_subcommands().front();
    try {
        const RunConfig cfg = load_config(sub, fl);
        if (sub->get_name() == "validate") return cmd_validate(cfg);
        if (sub->get_name() == "forward") return cmd_forward(cfg);
        if (sub->get_name() == "sweep") return cmd_sweep(cfg);
        if (sub->get_name() == "locate") return cmd_locate(cfg);
        return cmd_spectro_dump(cfg);
    } catch (const eis::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const eis::RankDeficient& e) {
        std::cerr << e.what() << "\n";
        return 4;
    } catch (const eis::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const eis::SolverError& e) {
        std::cerr << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 3;
    }
}
