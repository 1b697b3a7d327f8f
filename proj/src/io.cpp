#include "opc/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "nlohmann/json.hpp"

static_assert(std::endian::native == std::endian::little,
              "file formats are defined little-endian");

namespace opc {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

Layout load_layout(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw IoError("layout " + path + ": " + e.what());
  }
  Layout layout;
  layout.width = j.value("width", 0);
  layout.height = j.value("height", 0);
  if (!j.contains("polygons") || !j["polygons"].is_array())
    throw IoError("layout " + path + ": missing \"polygons\" array");
  for (const auto& pj : j["polygons"]) {
    Polygon poly;
    for (const auto& vj : pj) {
      if (!vj.is_array() || vj.size() != 2)
        throw IoError("layout " + path + ": vertex must be [x, y]");
      poly.vertices.push_back({vj[0].get<double>(), vj[1].get<double>()});
    }
    validate_polygon(poly);
    layout.polygons.push_back(std::move(poly));
  }
  return layout;
}

void save_layout(const Layout& layout, const std::string& path) {
  nlohmann::json polys = nlohmann::json::array();
  for (const auto& p : layout.polygons) {
    nlohmann::json ring = nlohmann::json::array();
    for (const auto& v : p.vertices)
      ring.push_back({static_cast<long long>(std::llround(v.x)),
                      static_cast<long long>(std::llround(v.y))});
    polys.push_back(ring);
  }
  nlohmann::json j{{"width", layout.width}, {"height", layout.height},
                   {"polygons", polys}};
  write_file(path, j.dump(2) + "\n");
}

KernelSet load_kernels(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open kernel file " + path);
  uint32_t n_k = 0, k = 0;
  in.read(reinterpret_cast<char*>(&n_k), 4);
  in.read(reinterpret_cast<char*>(&k), 4);
  if (!in || n_k == 0 || k == 0 || k % 2 == 0)
    throw IoError("kernel file " + path + ": bad header");
  KernelSet ks;
  ks.size = static_cast<int>(k);
  ks.weights.resize(n_k);
  in.read(reinterpret_cast<char*>(ks.weights.data()), 8 * n_k);
  for (uint32_t i = 0; i < n_k; ++i) {
    std::vector<std::complex<float>> kern(static_cast<size_t>(k) * k);
    in.read(reinterpret_cast<char*>(kern.data()), sizeof(std::complex<float>) * kern.size());
    ks.kernels.push_back(std::move(kern));
  }
  if (!in) throw IoError("kernel file " + path + ": truncated");
  return ks;
}

void save_kernels(const KernelSet& ks, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write kernel file " + path);
  const uint32_t n_k = static_cast<uint32_t>(ks.count());
  const uint32_t k = static_cast<uint32_t>(ks.size);
  out.write(reinterpret_cast<const char*>(&n_k), 4);
  out.write(reinterpret_cast<const char*>(&k), 4);
  out.write(reinterpret_cast<const char*>(ks.weights.data()), 8 * n_k);
  for (const auto& kern : ks.kernels)
    out.write(reinterpret_cast<const char*>(kern.data()),
              sizeof(std::complex<float>) * kern.size());
  if (!out) throw IoError("write failed: " + path);
}

MrcRuleSet load_rules(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw IoError("rules " + path + ": " + e.what());
  }
  MrcRuleSet r;
  r.min_width = j.value("min_width", r.min_width);
  r.min_spacing = j.value("min_spacing", r.min_spacing);
  r.eol_spacing = j.value("eol_spacing", r.eol_spacing);
  r.notch_spacing = j.value("notch_spacing", r.notch_spacing);
  r.jog_spacing = j.value("jog_spacing", r.jog_spacing);
  r.beta = j.value("beta", r.beta);
  if (r.min_width <= 0 || r.min_spacing <= 0 || r.beta <= 0)
    throw IoError("rules " + path + ": constants must be positive");
  return r;
}

void save_pgm(const RealGrid& mask, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "P5\n" << mask.width() << " " << mask.height() << "\n255\n";
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x)
      out.put(mask.at(x, y) > 0.5 ? static_cast<char>(255) : static_cast<char>(0));
  if (!out) throw IoError("write failed: " + path);
}

RealGrid load_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  in >> magic >> w >> h >> maxval;
  if (magic != "P5" || w <= 0 || h <= 0 || maxval != 255)
    throw IoError("unsupported PGM: " + path);
  in.get();  // single whitespace after header
  RealGrid mask(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const int c = in.get();
      if (c < 0) throw IoError("truncated PGM: " + path);
      mask.at(x, y) = c > 127 ? 1.0 : 0.0;
    }
  return mask;
}

void save_raw(const RealGrid& mask, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x)
      out.put(mask.at(x, y) > 0.5 ? 1 : 0);
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace opc
