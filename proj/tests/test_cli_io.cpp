#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include "json.hpp"
#include "microct/io.hpp"
#include "microct/manifest.hpp"

using namespace microct;
namespace fs = std::filesystem;

namespace {

std::string cli_path() {
    const char* env = std::getenv("MICROCT_CLI");
    REQUIRE(env != nullptr);
    return env;
}

int run_cli(const std::string& args) {
    const int rc = std::system((cli_path() + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(rc);
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("microct_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::vector<char> slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary | std::ios::ate);
    REQUIRE(in.good());
    std::vector<char> buf(static_cast<std::size_t>(in.tellg()));
    in.seekg(0);
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    return buf;
}

void write_disc_spec(const fs::path& path) {
    std::ofstream out(path);
    out << R"({"components": [{"type": "disc", "center": [0, 0], "radius": 1.0, "value": 1.0}]})";
}

}  // namespace

TEST_CASE("image files round-trip bit-exactly") {
    const auto dir = fresh_dir("img");
    const Grid2 g(37, 1.25);
    Image img(g);
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (auto& v : img.values) v = u(rng);
    const std::string base = (dir / "f").string();
    save_image(img, base);
    const Image back = load_image(base);
    CHECK(back.grid == g);
    CHECK(back.values == img.values);

    ComplexImage cimg(g);
    for (auto& v : cimg.values) v = complexd(u(rng), u(rng));
    save_image(cimg, (dir / "c").string());
    const auto any = load_any_image((dir / "c").string());
    REQUIRE(std::holds_alternative<ComplexImage>(any));
    CHECK(std::get<ComplexImage>(any).values == cimg.values);
    // loading a complex file as real is an error
    CHECK_THROWS_AS((void)load_image((dir / "c").string()), std::runtime_error);
}

TEST_CASE("sinogram files round-trip bit-exactly") {
    const auto dir = fresh_dir("sino");
    const SinogramGeometry geom(21, 1.4, 18);
    Sinogram sino(geom);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& v : sino.values) v = u(rng);
    save_sinogram(sino, (dir / "s").string());
    const Sinogram back = load_sinogram((dir / "s").string());
    CHECK(back.geometry == geom);
    CHECK(back.values == sino.values);
}

TEST_CASE("csv format uses nine significant scientific digits") {
    CHECK(format_csv_value(1.0) == "1.00000000e+00");
    CHECK(format_csv_value(-0.0312499999) == "-3.12499999e-02");
    const auto dir = fresh_dir("csv");
    CsvTable t;
    t.header = {"a", "b"};
    t.rows = {{1.5, -2.25e-7}, {3.0, 4.0}};
    save_csv(t, (dir / "t.csv").string());
    const CsvTable back = load_csv((dir / "t.csv").string());
    REQUIRE(back.header == t.header);
    REQUIRE(back.rows.size() == 2);
    CHECK(back.rows[0][1] == doctest::Approx(-2.25e-7).epsilon(1e-9));
}

TEST_CASE("phantom subcommand writes outputs and a finalized manifest") {
    const auto dir = fresh_dir("cli_phantom");
    write_disc_spec(dir / "disc.json");
    const std::string out = (dir / "f").string();
    const int rc = run_cli("phantom --spec " + (dir / "disc.json").string() +
                           " --grid 64 --extent 1.5 --out " + out);
    CHECK(rc == 0);
    CHECK(fs::exists(out + ".json"));
    CHECK(fs::exists(out + ".bin"));
    const Image img = load_image(out);
    CHECK(img.grid.n == 64);

    nlohmann::json manifest;
    std::ifstream min(dir / "manifest.json");
    REQUIRE(min.good());
    min >> manifest;
    CHECK(manifest.at("status") == "complete");
    // every declared output carries a content hash
    for (const auto& [path, hash] : manifest.at("outputs").items()) {
        CHECK(hash.get<std::string>().rfind("fnv1a64:", 0) == 0);
        CHECK(fs::exists(path));
    }
}

TEST_CASE("unknown flags exit with the usage code") {
    CHECK(run_cli("phantom --bogus 3") == 2);
    CHECK(run_cli("") == 2);
}

TEST_CASE("support violations propagate as runtime errors") {
    const auto dir = fresh_dir("cli_support");
    write_disc_spec(dir / "disc.json");
    const std::string img = (dir / "f").string();
    CHECK(run_cli("phantom --spec " + (dir / "disc.json").string() + " --grid 64 --extent 1.5 --out " +
                  img) == 0);
    // s_max smaller than the disc support triggers the xray error
    CHECK(run_cli("sinogram --image " + img + " --ns 32 --nw 16 --smax 0.5 --out " +
                  (dir / "s").string()) == 1);
}

TEST_CASE("identical flags and inputs give byte-identical outputs") {
    const auto dir = fresh_dir("cli_det");
    write_disc_spec(dir / "disc.json");
    const std::string img = (dir / "f").string();
    REQUIRE(run_cli("phantom --spec " + (dir / "disc.json").string() +
                    " --grid 96 --extent 1.5 --out " + img) == 0);
    const std::string args = "sinogram --image " + img + " --ns 48 --nw 32 --smax 1.45 --out ";
    REQUIRE(run_cli(args + (dir / "s1").string()) == 0);
    REQUIRE(run_cli(args + (dir / "s2").string()) == 0);
    CHECK(slurp(dir / "s1.bin") == slurp(dir / "s2.bin"));

    // masked sinograms honor the mask flag
    REQUIRE(run_cli("sinogram --image " + img +
                    " --ns 48 --nw 32 --smax 1.45 --mask exterior:1.45 --out " +
                    (dir / "sz").string()) == 0);
    const Sinogram sz = load_sinogram((dir / "sz").string());
    for (double v : sz.values) CHECK(v == 0.0);
}

TEST_CASE("recon subcommand produces an image and error report") {
    const auto dir = fresh_dir("cli_recon");
    write_disc_spec(dir / "disc.json");
    const std::string img = (dir / "f").string();
    REQUIRE(run_cli("phantom --spec " + (dir / "disc.json").string() +
                    " --grid 128 --extent 1.5 --out " + img) == 0);
    REQUIRE(run_cli("sinogram --image " + img + " --ns 128 --nw 128 --smax 1.45 --out " +
                    (dir / "s").string()) == 0);
    REQUIRE(run_cli("recon --sino " + (dir / "s").string() + " --method fbp --grid 128 " +
                    "--extent 1.5 --truth " + (dir / "disc.json").string() + " --out " +
                    (dir / "r").string()) == 0);
    nlohmann::json rj;
    std::ifstream rin(dir / "r.report.json");
    REQUIRE(rin.good());
    rin >> rj;
    CHECK(rj.at("interior_rel_error").get<double>() < 0.05);
}

TEST_CASE("report merges runs, fits slopes, and skips missing manifests") {
    const auto dir = fresh_dir("cli_report");
    // a synthetic finished run with exact power-law data
    const auto run = dir / "run1";
    fs::create_directories(run);
    {
        RunManifest manifest("gelfand", {{"out", run.string()}});
        manifest.declare_output((run / "gelfand.csv").string());
        manifest.write_pending(run.string());
        CsvTable t;
        t.header = {"lambda", "abs_error"};
        for (double lam : {8.0, 16.0, 32.0, 64.0}) t.rows.push_back({lam, 3.7 / lam});
        save_csv(t, (run / "gelfand.csv").string());
        manifest.finalize(run.string());
    }
    const auto empty_run = dir / "run2";
    fs::create_directories(empty_run);

    const std::string out = (dir / "report.md").string();
    CHECK(run_cli("report --runs " + run.string() + " " + empty_run.string() + " --out " + out) == 0);
    std::ifstream in(out);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    // slope fit on exact power-law data recovers -1 to nine digits
    CHECK(text.find("-1.00000000e+00") != std::string::npos);
    CHECK(text.find("skipped: no manifest") != std::string::npos);
}
