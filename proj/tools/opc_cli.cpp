#include <cmath>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "nlohmann/json.hpp"
#include "opc/fixtures.hpp"
#include "opc/io.hpp"
#include "opc/optimizer.hpp"
#include "opc/raster.hpp"

using namespace opc;

namespace {

int cmd_check(const std::string& layout_path, const std::string& rules_path,
              double seg_length) {
  const Layout layout = load_layout(layout_path);
  MrcRuleSet rules;
  if (!rules_path.empty()) rules = load_rules(rules_path);
  const SegmentSet segs =
      merge_corners(ste_round(segment_edges(layout.polygons, seg_length)));
  const auto violations = check_violations(segs, rules);
  std::cout << violations_to_json(violations) << "\n";
  return violations.empty() ? 0 : 2;
}

int cmd_metrics(const std::string& mask_path, const std::string& layout_path,
                const std::string& kernel_path, double seg_length, int th_epe,
                double i_th, double dose_lo, double dose_hi) {
  const RealGrid mask = load_pgm(mask_path);
  const Layout layout = load_layout(layout_path);
  const KernelSet kernels = load_kernels(kernel_path);
  const int w = mask.width(), h = mask.height();
  const SegmentSet target_segs = segment_edges(layout.polygons, seg_length);
  const MaskGrid target = rasterize(merge_corners(ste_round(target_segs)), w, h);
  const EpeSamplePlan plan = make_epe_plan(target_segs, th_epe, 50.0, w, h);

  LithoSim sim(kernels, w, h);
  const RealGrid intensity = sim.simulate(mask);
  RealGrid i_lo(w, h), i_hi(w, h);
  for (size_t i = 0; i < intensity.size(); ++i) {
    i_lo[i] = intensity[i] * dose_lo;
    i_hi[i] = intensity[i] * dose_hi;
  }
  MetricsReport r;
  r.l2 = metric_l2(resist_hard(intensity, i_th), target);
  r.pvb = metric_pvb(resist_hard(i_hi, i_th), resist_hard(i_lo, i_th));
  r.epe_count = metric_epe(resist_hard(intensity, i_th), target, plan);
  r.shots = shot_count(mask);
  std::cout << metrics_to_json(r) << "\n";
  return 0;
}

int cmd_seeds(const std::string& layout_path, const std::string& kernel_path,
              const std::string& out_path, double alpha, double i_th) {
  const Layout layout = load_layout(layout_path);
  const KernelSet kernels = load_kernels(kernel_path);
  SrafConfig cfg;
  cfg.upsample = 1;  // seeding at the layout's own resolution
  const SegmentSet segs = segment_edges(layout.polygons, 80.0);
  const MaskGrid target =
      rasterize(merge_corners(ste_round(segs)), layout.width, layout.height);
  const auto seeds = generate_sraf_seeds(target, kernels, cfg, alpha, i_th);
  nlohmann::json j = nlohmann::json::array();
  for (const auto& s : seeds) j.push_back({{"x", s.cx}, {"y", s.cy}, {"score", s.score}});
  const std::string text = j.dump(2) + "\n";
  if (out_path.empty())
    std::cout << text;
  else
    write_file(out_path, text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"edge-based mask optimization toolkit"};
  app.require_subcommand(1);

  auto* opt = app.add_subcommand("optimize", "run the optimization loop from a config");
  std::string config_path, layout_path, kernel_path, out_dir, rules_path, mask_path;
  std::string name = "square", out_path;
  opt->add_option("--config", config_path, "JSON config file")->required();
  opt->add_option("--layout", layout_path, "layout JSON (overrides config)");
  opt->add_option("--kernels", kernel_path, "kernel binary (overrides config)");
  opt->add_option("--out", out_dir, "output directory (overrides config)");

  auto* chk = app.add_subcommand("check", "rule-check a layout, print violations JSON");
  double seg_length = 80.0, i_th = 0.225, alpha = 50.0;
  double dose_lo = 0.98, dose_hi = 1.02;
  int th_epe = 15;
  chk->add_option("--layout", layout_path, "layout JSON")->required();
  chk->add_option("--rules", rules_path, "rules JSON");
  chk->add_option("--seg-length", seg_length, "segment length, nm");

  auto* met = app.add_subcommand("metrics", "score a mask image against a target layout");
  met->add_option("--mask", mask_path, "mask PGM")->required();
  met->add_option("--layout", layout_path, "target layout JSON")->required();
  met->add_option("--kernels", kernel_path, "kernel binary")->required();
  met->add_option("--seg-length", seg_length, "segment length, nm");
  met->add_option("--th-epe", th_epe, "EPE tolerance, px");
  met->add_option("--i-th", i_th, "resist threshold");
  met->add_option("--dose-lo", dose_lo, "min dose corner");
  met->add_option("--dose-hi", dose_hi, "max dose corner");

  auto* sds = app.add_subcommand("seeds", "propose assist-feature seed positions");
  sds->add_option("--layout", layout_path, "target layout JSON")->required();
  sds->add_option("--kernels", kernel_path, "kernel binary")->required();
  sds->add_option("--out", out_path, "output JSON (stdout if omitted)");
  sds->add_option("--alpha", alpha, "resist sigmoid steepness");
  sds->add_option("--i-th", i_th, "resist threshold");

  auto* mk = app.add_subcommand("make-kernels", "write a synthetic kernel binary");
  int ksize = 41, kcount = 4;
  double na_proxy = 1.0;
  uint64_t seed = 0;
  mk->add_option("--size", ksize, "kernel size K (odd)");
  mk->add_option("--count", kcount, "number of kernels");
  mk->add_option("--na", na_proxy, "aperture proxy, larger = sharper");
  mk->add_option("--seed", seed, "phase seed");
  mk->add_option("--out", out_path, "output file")->required();

  auto* fx = app.add_subcommand("fixture", "write a named test layout as JSON");
  double scale = 100.0;
  int width = 0, height = 0;
  fx->add_option("--name", name, "square|lines|contact|comb|staircase|donut|square_lines");
  fx->add_option("--scale", scale, "feature scale, nm");
  fx->add_option("--width", width, "clip width (0 = bounding box)");
  fx->add_option("--height", height, "clip height");
  fx->add_option("--out", out_path, "output file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*opt) {
      RunOverrides ov;
      if (!layout_path.empty()) ov.layout = layout_path;
      if (!kernel_path.empty()) ov.kernels = kernel_path;
      if (!out_dir.empty()) ov.out_dir = out_dir;
      return run_from_config(config_path, ov);
    }
    if (*chk) return cmd_check(layout_path, rules_path, seg_length);
    if (*met)
      return cmd_metrics(mask_path, layout_path, kernel_path, seg_length, th_epe, i_th,
                         dose_lo, dose_hi);
    if (*sds) return cmd_seeds(layout_path, kernel_path, out_path, alpha, i_th);
    if (*mk) {
      save_kernels(make_synthetic_kernels(ksize, kcount, na_proxy, seed), out_path);
      return 0;
    }
    if (*fx) {
      Layout layout;
      layout.polygons = fixtures::make_fixture(name, scale).layout;
      layout.width = width;
      layout.height = height;
      if (width == 0 || height == 0) {
        double mx = 0, my = 0;
        for (const auto& p : layout.polygons)
          for (const auto& v : p.vertices) {
            mx = std::max(mx, v.x);
            my = std::max(my, v.y);
          }
        layout.width = static_cast<int>(mx) + 64;
        layout.height = static_cast<int>(my) + 64;
      }
      save_layout(layout, out_path);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
