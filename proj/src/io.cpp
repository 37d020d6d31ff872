#include "microct/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace microct {

namespace {

using nlohmann::json;

void write_binary(const std::string& path, const void* data, std::size_t bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<char> read_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw std::runtime_error("cannot open: " + path);
    const auto size = in.tellg();
    in.seekg(0);
    std::vector<char> buf(static_cast<std::size_t>(size));
    in.read(buf.data(), size);
    if (!in) throw std::runtime_error("read failed: " + path);
    return buf;
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    json j;
    in >> j;
    return j;
}

void write_json(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump(2) << "\n";
}

}  // namespace

void save_image(const Image& img, const std::string& base_path) {
    json header = {{"n", img.grid.n},
                   {"extent", img.grid.extent},
                   {"dtype", "f64"},
                   {"layout", "row-major"}};
    write_json(header, base_path + ".json");
    write_binary(base_path + ".bin", img.values.data(), img.values.size() * sizeof(double));
}

void save_image(const ComplexImage& img, const std::string& base_path) {
    json header = {{"n", img.grid.n},
                   {"extent", img.grid.extent},
                   {"dtype", "c64"},
                   {"layout", "row-major"}};
    write_json(header, base_path + ".json");
    write_binary(base_path + ".bin", img.values.data(), img.values.size() * sizeof(complexd));
}

AnyImage load_any_image(const std::string& base_path) {
    const json header = read_json(base_path + ".json");
    const Grid2 grid(header.at("n").get<int>(), header.at("extent").get<double>());
    const std::string dtype = header.at("dtype").get<std::string>();
    const auto bytes = read_binary(base_path + ".bin");
    if (dtype == "f64") {
        Image img(grid);
        if (bytes.size() != img.values.size() * sizeof(double))
            throw std::runtime_error("image payload size mismatch: " + base_path);
        std::memcpy(img.values.data(), bytes.data(), bytes.size());
        return img;
    }
    if (dtype == "c64") {
        ComplexImage img(grid);
        if (bytes.size() != img.values.size() * sizeof(complexd))
            throw std::runtime_error("image payload size mismatch: " + base_path);
        std::memcpy(img.values.data(), bytes.data(), bytes.size());
        return img;
    }
    throw std::runtime_error("unknown dtype '" + dtype + "' in " + base_path);
}

Image load_image(const std::string& base_path) {
    auto any = load_any_image(base_path);
    if (auto* img = std::get_if<Image>(&any)) return std::move(*img);
    throw std::runtime_error("expected real image (dtype f64): " + base_path);
}

void save_sinogram(const Sinogram& sino, const std::string& base_path) {
    json header = {{"ns", sino.geometry.ns},
                   {"nw", sino.geometry.nw},
                   {"s_max", sino.geometry.s_max},
                   {"dtype", "f64"},
                   {"layout", "angle-major"}};
    write_json(header, base_path + ".json");
    write_binary(base_path + ".bin", sino.values.data(), sino.values.size() * sizeof(double));
}

Sinogram load_sinogram(const std::string& base_path) {
    const json header = read_json(base_path + ".json");
    const SinogramGeometry geom(header.at("ns").get<int>(), header.at("s_max").get<double>(),
                                header.at("nw").get<int>());
    Sinogram sino(geom);
    const auto bytes = read_binary(base_path + ".bin");
    if (bytes.size() != sino.values.size() * sizeof(double))
        throw std::runtime_error("sinogram payload size mismatch: " + base_path);
    std::memcpy(sino.values.data(), bytes.data(), bytes.size());
    return sino;
}

std::string format_csv_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.8e", v);
    return buf;
}

void save_csv(const CsvTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (std::size_t i = 0; i < table.header.size(); ++i)
        out << table.header[i] << (i + 1 < table.header.size() ? "," : "");
    out << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << format_csv_value(row[i]) << (i + 1 < row.size() ? "," : "");
        out << "\n";
    }
}

CsvTable load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) return table;
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) table.header.push_back(cell);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream rs(line);
        while (std::getline(rs, cell, ',')) row.push_back(std::stod(cell));
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace microct
