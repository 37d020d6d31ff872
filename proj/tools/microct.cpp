#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "microct/calderon.hpp"
#include "microct/io.hpp"
#include "microct/manifest.hpp"
#include "microct/microlocal.hpp"
#include "microct/recon.hpp"
#include "microct/wavelab.hpp"

using namespace microct;
namespace fs = std::filesystem;

namespace {

Phantom load_phantom_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("phantom: cannot open " + path);
    nlohmann::json j;
    in >> j;
    std::vector<PhantomComponent> components;
    for (const auto& c : j.at("components")) {
        const auto center = c.at("center");
        const Vec2 ctr{center.at(0).get<double>(), center.at(1).get<double>()};
        const double value = c.at("value").get<double>();
        const std::string type = c.at("type").get<std::string>();
        if (type == "disc") {
            components.push_back(PhantomComponent::disc(ctr, c.at("radius").get<double>(), value));
        } else if (type == "ellipse") {
            const auto axes = c.at("semi_axes");
            components.push_back(PhantomComponent::ellipse(ctr, axes.at(0).get<double>(),
                                                           axes.at(1).get<double>(),
                                                           c.value("rotation", 0.0), value));
        } else {
            throw std::runtime_error("phantom: unknown component type '" + type + "'");
        }
    }
    return Phantom(std::move(components));
}

LineSet parse_mask(const std::string& spec) {
    if (spec.empty() || spec == "full") return LineSet::full();
    if (spec.rfind("limited:", 0) == 0) return LineSet::limited_angle(std::stod(spec.substr(8)));
    if (spec.rfind("exterior:", 0) == 0) return LineSet::exterior(std::stod(spec.substr(9)));
    throw std::runtime_error("mask: expected full, limited:<a> or exterior:<rho>, got '" + spec +
                             "'");
}

std::vector<double> parse_list(const std::string& spec) {
    std::vector<double> out;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    if (out.empty()) throw std::runtime_error("expected a comma-separated list, got '" + spec + "'");
    return out;
}

double smooth_disc_bump(Vec2 x, Vec2 c, double r, double amp) {
    const double u2 = (x - c).dot(x - c) / (r * r);
    return u2 >= 1.0 ? 0.0 : amp * std::exp(1.0 - 1.0 / (1.0 - u2));
}

Image load_potential_image(const std::string& spec, const Grid2& grid) {
    if (spec.rfind("bump:", 0) == 0) {
        const auto v = parse_list(spec.substr(5));
        if (v.size() != 4) throw std::runtime_error("potential bump expects cx,cy,r,amp");
        return sample(grid, [&](Vec2 p) { return smooth_disc_bump(p, {v[0], v[1]}, v[2], v[3]); });
    }
    if (spec == "zero") return Image(grid);
    if (fs::exists(spec + ".json")) {
        const Image img = load_image(spec);
        if (img.grid == grid) return img;
        Image out(grid);
        for (int iy = 0; iy < grid.n; ++iy)
            for (int ix = 0; ix < grid.n; ++ix) out.at(ix, iy) = img.interp(grid.node(ix, iy));
        return out;
    }
    // fall back to a phantom description
    return rasterize(load_phantom_spec(spec), grid);
}

Conductivity load_conductivity(const std::string& spec, const HalfGrid& grid) {
    if (spec.rfind("const:", 0) == 0)
        return Conductivity::constant(grid, std::stod(spec.substr(6)));
    if (spec.rfind("edge-bump:", 0) == 0) {
        const auto v = parse_list(spec.substr(10));
        if (v.size() != 3) throw std::runtime_error("edge-bump expects amp,width,height");
        return Conductivity::from_function(grid, [&](double xp, double xn) {
            const double u = xp / v[1], w = xn / v[2];
            const double b = (u * u >= 1.0 || w * w >= 1.0)
                                 ? 0.0
                                 : std::exp(2.0 - 1.0 / (1.0 - u * u) - 1.0 / (1.0 - w * w));
            return 1.0 + v[0] * b;
        });
    }
    if (spec.rfind("normal-bump:", 0) == 0) {
        const auto v = parse_list(spec.substr(12));
        if (v.size() != 2) throw std::runtime_error("normal-bump expects amp,width");
        return Conductivity::from_function(grid, [&](double xp, double xn) {
            const double u = xp / v[1];
            const double b = u * u >= 1.0 ? 0.0 : std::exp(1.0 - 1.0 / (1.0 - u * u));
            const double w = xn / 0.5;
            const double taper = w * w >= 1.0 ? 0.0 : std::exp(1.0 - 1.0 / (1.0 - w * w));
            return 1.0 + v[0] * xn * taper * b;
        });
    }
    if (fs::exists(spec + ".json")) {
        const Image img = load_image(spec);
        RealHalfField f(grid);
        for (int j = 0; j < grid.ny; ++j)
            for (int i = 0; i < grid.nx; ++i) f.at(i, j) = img.interp({grid.xp(i), grid.xn(j)});
        return Conductivity(std::move(f));
    }
    throw std::runtime_error("conductivity: expected const:, edge-bump:, normal-bump: or an image");
}

std::string parent_dir(const std::string& out) {
    const fs::path p(out);
    return p.has_parent_path() ? p.parent_path().string() : ".";
}

int cmd_phantom(const std::string& spec, int n, double extent, const std::string& out) {
    RunManifest manifest("phantom", {{"spec", spec},
                                     {"grid", std::to_string(n)},
                                     {"extent", format_csv_value(extent)},
                                     {"out", out}});
    manifest.add_input(spec);
    manifest.declare_output(out + ".json");
    manifest.declare_output(out + ".bin");
    manifest.write_pending(parent_dir(out));
    const Phantom phantom = load_phantom_spec(spec);
    save_image(rasterize(phantom, Grid2(n, extent)), out);
    manifest.finalize(parent_dir(out));
    return 0;
}

int cmd_sinogram(const std::string& phantom_spec, const std::string& image_path, int ns, int nw,
                 double smax, const std::string& mask_spec, const std::string& out) {
    RunManifest manifest("sinogram", {{"phantom", phantom_spec},
                                      {"image", image_path},
                                      {"ns", std::to_string(ns)},
                                      {"nw", std::to_string(nw)},
                                      {"smax", format_csv_value(smax)},
                                      {"mask", mask_spec},
                                      {"out", out}});
    manifest.declare_output(out + ".json");
    manifest.declare_output(out + ".bin");

    const SinogramGeometry geom(ns, smax, nw);
    Sinogram sino(geom);
    if (!image_path.empty()) {
        manifest.add_input(image_path + ".bin");
        manifest.write_pending(parent_dir(out));
        sino = radon(load_image(image_path), geom);
    } else if (!phantom_spec.empty()) {
        manifest.add_input(phantom_spec);
        manifest.write_pending(parent_dir(out));
        const Phantom phantom = load_phantom_spec(phantom_spec);
        for (int k = 0; k < nw; ++k)
            for (int i = 0; i < ns; ++i)
                sino.at(i, k) = phantom.analytic_radon(geom.offset(i), geom.omega(k));
    } else {
        throw std::runtime_error("sinogram: need --phantom or --image");
    }
    sino = mask(sino, parse_mask(mask_spec));
    save_sinogram(sino, out);
    manifest.finalize(parent_dir(out));
    return 0;
}

int cmd_recon(const std::string& sino_path, const std::string& method, int n, double extent,
              const std::string& mask_spec, const std::string& truth_spec,
              const std::string& out) {
    RunManifest manifest("recon", {{"sino", sino_path},
                                   {"method", method},
                                   {"grid", std::to_string(n)},
                                   {"extent", format_csv_value(extent)},
                                   {"mask", mask_spec},
                                   {"truth", truth_spec},
                                   {"out", out}});
    manifest.add_input(sino_path + ".bin");
    manifest.declare_output(out + ".json");
    manifest.declare_output(out + ".bin");
    manifest.declare_output(out + ".report.json");
    manifest.write_pending(parent_dir(out));

    const Sinogram sino = load_sinogram(sino_path);
    const Grid2 grid(n, extent);
    std::optional<Image> truth;
    std::optional<Phantom> phantom;
    if (!truth_spec.empty()) {
        phantom = load_phantom_spec(truth_spec);
        truth = rasterize(*phantom, grid);
    }
    const auto report = masked_recon(sino, parse_mask(mask_spec), grid,
                                     recon_method_from_string(method), truth ? &*truth : nullptr);
    save_image(report.image, out);

    nlohmann::json rj;
    rj["method"] = method;
    rj["mask"] = mask_spec.empty() ? "full" : mask_spec;
    if (report.rel_error_vs_truth) {
        rj["rel_error_vs_truth"] = *report.rel_error_vs_truth;
        rj["interior_rel_error"] =
            interior_rel_error(report.image, *truth, *phantom, 3, 0.0, 0.95 * sino.geometry.s_max);
    }
    std::ofstream rout(out + ".report.json");
    rout << rj.dump(2) << "\n";
    manifest.finalize(parent_dir(out));
    return 0;
}

int cmd_wavefront(const std::string& image_path, const std::string& phantom_spec,
                  const std::string& mask_spec, int samples, const std::string& out) {
    RunManifest manifest("wavefront", {{"image", image_path},
                                       {"phantom", phantom_spec},
                                       {"mask", mask_spec},
                                       {"samples", std::to_string(samples)},
                                       {"out", out}});
    manifest.add_input(image_path + ".bin");
    manifest.add_input(phantom_spec);
    manifest.declare_output(out);
    manifest.write_pending(parent_dir(out));

    const Image img = load_image(image_path);
    const Phantom phantom = load_phantom_spec(phantom_spec);
    const auto rows = visibility_report(phantom, parse_mask(mask_spec), img, samples);
    CsvTable table;
    table.header = {"x0_x", "x0_y", "xi0_x", "xi0_y", "predicted", "decay_exponent",
                    "magnitude", "alpha_star"};
    for (const auto& r : rows) {
        table.rows.push_back({r.sample.x0.x, r.sample.x0.y, r.sample.xi0.x, r.sample.xi0.y,
                              r.predicted_visible ? 1.0 : 0.0, r.decay_exponent, r.magnitude,
                              sobolev_strength_from_exponent(r.decay_exponent)});
    }
    save_csv(table, out);
    manifest.finalize(parent_dir(out));
    return 0;
}

int cmd_gelfand(const std::string& q1_spec, const std::string& q2_spec,
                const std::string& segment_spec, const std::string& lambdas_spec, int n, double T,
                const std::string& out_dir) {
    RunManifest manifest("gelfand", {{"q1", q1_spec},
                                     {"q2", q2_spec},
                                     {"segment", segment_spec},
                                     {"lambdas", lambdas_spec},
                                     {"grid", std::to_string(n)},
                                     {"T", format_csv_value(T)},
                                     {"out", out_dir}});
    fs::create_directories(out_dir);
    manifest.declare_output(out_dir + "/gelfand.csv");
    manifest.declare_output(out_dir + "/gelfand.json");
    manifest.write_pending(out_dir);

    const auto segv = parse_list(segment_spec);
    if (segv.size() != 4) throw std::runtime_error("gelfand: segment expects x0,y0,dx,dy");
    const Segment seg = Segment::through({segv[0], segv[1]}, Vec2{segv[2], segv[3]}.normalized());

    const Grid2 grid(n, 1.0);
    const int nt = static_cast<int>(std::ceil(T / (grid.spacing() / 2.0))) + 1;
    const SpaceTimeGrid st(grid, nt, T);
    const Potential q1(load_potential_image(q1_spec, grid));
    const Potential q2(load_potential_image(q2_spec, grid));

    const auto rows = xray_recovery_experiment(q1, q2, seg, parse_list(lambdas_spec), st);
    CsvTable table;
    table.header = {"lambda", "pairing_value", "pairing_value_imag", "line_integral", "abs_error"};
    for (const auto& r : rows)
        table.rows.push_back({r.lambda, r.pairing_value.real(), r.pairing_value.imag(),
                              r.line_integral, r.abs_error});
    save_csv(table, out_dir + "/gelfand.csv");

    nlohmann::json meta;
    meta["segment"] = {{"origin", {seg.origin.x, seg.origin.y}},
                       {"direction", {seg.direction.x, seg.direction.y}},
                       {"delta", seg.delta},
                       {"L", seg.L}};
    meta["grid"] = {{"n", n}, {"nt", st.nt}, {"T", T}, {"dt", st.dt()}};
    std::ofstream mo(out_dir + "/gelfand.json");
    mo << meta.dump(2) << "\n";
    manifest.finalize(out_dir);
    return 0;
}

int cmd_calderon(const std::string& g1_spec, const std::string& g2_spec, double x0, int order,
                 const std::string& lambdas_spec, int n, const std::string& out_dir) {
    RunManifest manifest("calderon", {{"gamma1", g1_spec},
                                      {"gamma2", g2_spec},
                                      {"x0", format_csv_value(x0)},
                                      {"order", std::to_string(order)},
                                      {"lambdas", lambdas_spec},
                                      {"grid", std::to_string(n)},
                                      {"out", out_dir}});
    fs::create_directories(out_dir);
    manifest.declare_output(out_dir + "/calderon.csv");
    manifest.write_pending(out_dir);

    const HalfGrid grid = HalfGrid::unit(n);
    const Conductivity g1 = load_conductivity(g1_spec, grid);
    const Conductivity g2 = load_conductivity(g2_spec, grid);
    const int N = order == 0 ? 1 : 2;
    const auto rows = boundary_determination_experiment(g1, g2, x0, parse_list(lambdas_spec), order,
                                                        N, 2 * N + 2, edge_bump(x0, 0.2));
    CsvTable table;
    table.header = {"lambda", "k", "scaled_integral", "boundary_oracle", "rel_error"};
    for (const auto& r : rows)
        table.rows.push_back({r.lambda, static_cast<double>(r.k), r.scaled_integral,
                              r.boundary_oracle, r.rel_error});
    save_csv(table, out_dir + "/calderon.csv");
    manifest.finalize(out_dir);
    return 0;
}

int cmd_report(const std::vector<std::string>& run_dirs, const std::string& out) {
    std::ofstream md(out);
    if (!md) throw std::runtime_error("report: cannot open " + out);
    md << "# Run report\n\n";
    for (const auto& dir : run_dirs) {
        md << "## " << dir << "\n\n";
        if (!fs::exists(dir + "/manifest.json")) {
            md << "skipped: no manifest\n\n";
            continue;
        }
        nlohmann::json manifest;
        {
            std::ifstream in(dir + "/manifest.json");
            in >> manifest;
        }
        md << "command: `" << manifest.value("command", "?") << "`\n\n";
        std::vector<fs::path> csvs;
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.path().extension() == ".csv") csvs.push_back(entry.path());
        std::sort(csvs.begin(), csvs.end());
        for (const auto& path : csvs) {
            const CsvTable table = load_csv(path.string());
            md << "### " << path.filename().string() << "\n\n|";
            for (const auto& hcol : table.header) md << " " << hcol << " |";
            md << "\n|";
            for (std::size_t i = 0; i < table.header.size(); ++i) md << " --- |";
            md << "\n";
            for (const auto& row : table.rows) {
                md << "|";
                for (double v : row) md << " " << format_csv_value(v) << " |";
                md << "\n";
            }
            // fitted log-log slopes of positive columns against a lambda column
            int lam_col = -1;
            for (std::size_t c = 0; c < table.header.size(); ++c)
                if (table.header[c] == "lambda") lam_col = static_cast<int>(c);
            if (lam_col >= 0 && table.rows.size() >= 2) {
                md << "\n";
                for (std::size_t c = 0; c < table.header.size(); ++c) {
                    if (static_cast<int>(c) == lam_col) continue;
                    std::vector<double> xs, ys;
                    for (const auto& row : table.rows) {
                        if (c < row.size() && row[c] > 0.0 && row[lam_col] > 0.0) {
                            xs.push_back(row[lam_col]);
                            ys.push_back(row[c]);
                        }
                    }
                    if (xs.size() == table.rows.size()) {
                        md << "fitted slope of " << table.header[c]
                           << " vs lambda: " << format_csv_value(loglog_slope(xs, ys)) << "\n";
                    }
                }
            }
            md << "\n";
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Radon transform, visible-singularity, and quasimode toolkit"};
    app.require_subcommand(1);
    // all subcommands are deterministic; the seed is reserved for randomized
    // test-data generation and recorded in manifests
    long seed = 0;
    app.add_option("--seed", seed, "seed for randomized test-data generation");

    auto* phantom = app.add_subcommand("phantom", "rasterize a phantom description");
    std::string ph_spec, ph_out;
    int ph_grid = 256;
    double ph_extent = 1.5;
    phantom->add_option("--spec", ph_spec)->required();
    phantom->add_option("--grid", ph_grid);
    phantom->add_option("--extent", ph_extent);
    phantom->add_option("--out", ph_out)->required();

    auto* sino = app.add_subcommand("sinogram", "forward-project a phantom or image");
    std::string sg_phantom, sg_image, sg_mask = "full", sg_out;
    int sg_ns = 256, sg_nw = 256;
    double sg_smax = 1.45;
    sino->add_option("--phantom", sg_phantom);
    sino->add_option("--image", sg_image);
    sino->add_option("--ns", sg_ns);
    sino->add_option("--nw", sg_nw);
    sino->add_option("--smax", sg_smax);
    sino->add_option("--mask", sg_mask);
    sino->add_option("--out", sg_out)->required();

    auto* recon = app.add_subcommand("recon", "reconstruct from a sinogram");
    std::string rc_sino, rc_method = "fbp", rc_mask = "full", rc_truth, rc_out;
    int rc_grid = 256;
    double rc_extent = 1.5;
    recon->add_option("--sino", rc_sino)->required();
    recon->add_option("--method", rc_method);
    recon->add_option("--grid", rc_grid);
    recon->add_option("--extent", rc_extent);
    recon->add_option("--mask", rc_mask);
    recon->add_option("--truth", rc_truth);
    recon->add_option("--out", rc_out)->required();

    auto* wf = app.add_subcommand("wavefront", "directional decay report for conormal samples");
    std::string wf_image, wf_phantom, wf_mask = "full", wf_out;
    int wf_samples = 32;
    wf->add_option("--image", wf_image)->required();
    wf->add_option("--phantom", wf_phantom)->required();
    wf->add_option("--mask", wf_mask);
    wf->add_option("--samples", wf_samples);
    wf->add_option("--out", wf_out)->required();

    auto* gel = app.add_subcommand("gelfand", "hyperbolic DN / X-ray recovery experiment");
    std::string ge_q1, ge_q2, ge_segment, ge_lambdas = "8,16,32,64", ge_out;
    int ge_grid = 129;
    double ge_T = 6.5;
    gel->add_option("--q1", ge_q1)->required();
    gel->add_option("--q2", ge_q2)->required();
    gel->add_option("--segment", ge_segment)->required();
    gel->add_option("--lambdas", ge_lambdas);
    gel->add_option("--grid", ge_grid);
    gel->add_option("--T", ge_T);
    gel->add_option("--out", ge_out)->required();

    auto* cal = app.add_subcommand("calderon", "elliptic DN boundary determination experiment");
    std::string ca_g1, ca_g2, ca_lambdas = "16,32,64", ca_out;
    double ca_x0 = 0.0;
    int ca_order = 0, ca_grid = 128;
    cal->add_option("--gamma1", ca_g1)->required();
    cal->add_option("--gamma2", ca_g2)->required();
    cal->add_option("--x0", ca_x0);
    cal->add_option("--order", ca_order);
    cal->add_option("--lambdas", ca_lambdas);
    cal->add_option("--grid", ca_grid);
    cal->add_option("--out", ca_out)->required();

    auto* rep = app.add_subcommand("report", "merge run directories into a Markdown summary");
    std::vector<std::string> rp_runs;
    std::string rp_out = "report.md";
    rep->add_option("--runs", rp_runs)->required();
    rep->add_option("--out", rp_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // usage error
    }

    try {
        if (*phantom) return cmd_phantom(ph_spec, ph_grid, ph_extent, ph_out);
        if (*sino) return cmd_sinogram(sg_phantom, sg_image, sg_ns, sg_nw, sg_smax, sg_mask, sg_out);
        if (*recon)
            return cmd_recon(rc_sino, rc_method, rc_grid, rc_extent, rc_mask, rc_truth, rc_out);
        if (*wf) return cmd_wavefront(wf_image, wf_phantom, wf_mask, wf_samples, wf_out);
        if (*gel) return cmd_gelfand(ge_q1, ge_q2, ge_segment, ge_lambdas, ge_grid, ge_T, ge_out);
        if (*cal) return cmd_calderon(ca_g1, ca_g2, ca_x0, ca_order, ca_lambdas, ca_grid, ca_out);
        if (*rep) return cmd_report(rp_runs, rp_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
