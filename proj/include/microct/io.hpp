#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "microct/xray.hpp"

namespace microct {

/// Image files are sidecar pairs: <base>.json holds {n, extent, dtype, layout}
/// and <base>.bin holds raw little-endian values, row-major with x fastest.
/// dtype "f64" is one double per node; "c64" is an interleaved (re, im) pair.
void save_image(const Image& img, const std::string& base_path);
void save_image(const ComplexImage& img, const std::string& base_path);

using AnyImage = std::variant<Image, ComplexImage>;
AnyImage load_any_image(const std::string& base_path);
Image load_image(const std::string& base_path);

/// Sinogram files mirror the image format with header {ns, nw, s_max};
/// values are angle-major (offset fastest).
void save_sinogram(const Sinogram& sino, const std::string& base_path);
Sinogram load_sinogram(const std::string& base_path);

/// CSV with a header row; numbers in scientific notation, 9 significant digits.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

void save_csv(const CsvTable& table, const std::string& path);
CsvTable load_csv(const std::string& path);

std::string format_csv_value(double v);

}  // namespace microct
