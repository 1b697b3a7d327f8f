#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "opc/fixtures.hpp"
#include "opc/io.hpp"

using namespace opc;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("opc_io_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("layout round trip") {
  TempDir tmp;
  Layout layout;
  layout.width = 128;
  layout.height = 96;
  layout.polygons = fixtures::make_fixture("donut", 16).layout;
  save_layout(layout, tmp.file("l.json"));
  const Layout back = load_layout(tmp.file("l.json"));
  CHECK(back.width == 128);
  CHECK(back.height == 96);
  REQUIRE(back.polygons.size() == 2);
  for (size_t p = 0; p < 2; ++p) CHECK(back.polygons[p].vertices == layout.polygons[p].vertices);
}

TEST_CASE("layout loader rejects malformed input") {
  TempDir tmp;
  write_file(tmp.file("bad.json"), "{\"width\": 4}");
  CHECK_THROWS_AS(load_layout(tmp.file("bad.json")), IoError);
  write_file(tmp.file("bad2.json"), "{\"polygons\": [[[0,0],[1,1],[0,1],[1,0]]]}");
  CHECK_THROWS_AS(load_layout(tmp.file("bad2.json")), GeometryError);  // non-Manhattan
  CHECK_THROWS_AS(load_layout(tmp.file("missing.json")), IoError);
}

TEST_CASE("kernel binary round trip") {
  TempDir tmp;
  const KernelSet ks = make_synthetic_kernels(15, 3, 1.1, 5);
  save_kernels(ks, tmp.file("k.bin"));
  const KernelSet back = load_kernels(tmp.file("k.bin"));
  CHECK(back.size == ks.size);
  CHECK(back.weights == ks.weights);
  CHECK(back.kernels == ks.kernels);
  CHECK_THROWS_AS(load_kernels(tmp.file("nope.bin")), IoError);
}

TEST_CASE("rules loader") {
  TempDir tmp;
  write_file(tmp.file("r.json"), "{\"min_width\": 32, \"beta\": 25}");
  const MrcRuleSet r = load_rules(tmp.file("r.json"));
  CHECK(r.min_width == 32.0);
  CHECK(r.min_spacing == 40.0);  // default preserved
  CHECK(r.beta == 25.0);
  write_file(tmp.file("neg.json"), "{\"min_width\": -1}");
  CHECK_THROWS_AS(load_rules(tmp.file("neg.json")), IoError);
}

TEST_CASE("pgm round trip and raw dump") {
  TempDir tmp;
  std::mt19937_64 rng(3);
  MaskGrid m(24, 16);
  for (size_t i = 0; i < m.size(); ++i) m[i] = rng() % 2;
  save_pgm(m, tmp.file("m.pgm"));
  CHECK(load_pgm(tmp.file("m.pgm")) == m);

  save_raw(m, tmp.file("m.raw"));
  const std::string raw = read_file(tmp.file("m.raw"));
  REQUIRE(raw.size() == m.size());
  for (size_t i = 0; i < m.size(); ++i)
    CHECK(static_cast<unsigned char>(raw[i]) == static_cast<unsigned char>(m[i]));
}
