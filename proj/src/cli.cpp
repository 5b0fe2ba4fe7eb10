#include "shearvol/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "shearvol/baselines.hpp"
#include "shearvol/denoise.hpp"
#include "shearvol/errors.hpp"
#include "shearvol/metrics.hpp"
#include "shearvol/phantom.hpp"
#include "shearvol/shearlet_system.hpp"
#include "shearvol/transform.hpp"
#include "shearvol/volio.hpp"

namespace shearvol::cli {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw UnwritableError("cannot write " + path.string());
  f << text;
  if (!f) throw UnwritableError("write failed for " + path.string());
}

struct TransformFlags {
  int scales = 2;
  std::vector<int> shear_levels{0, 1};
  std::string mode = "3d";

  void add_to(CLI::App* app) {
    app->add_option("--scales", scales, "number of directional scales")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app->add_option("--shear-levels", shear_levels, "shear level per scale, comma separated")
        ->delimiter(',')
        ->capture_default_str();
    app->add_option("--mode", mode, "3d (volumetric) or 2d (per B-scan)")
        ->capture_default_str()
        ->check(CLI::IsMember({"3d", "2d"}));
  }

  ShearletConfig config(const Dims3& d) const {
    return mode == "3d" ? ShearletConfig::volumetric(d, scales, shear_levels)
                        : ShearletConfig::bscan(d, scales, shear_levels);
  }
};

// ---- denoise -------------------------------------------------------------

struct DenoiseFlags {
  std::string in, out, stats, method = "shearlet";
  TransformFlags transform;
  double sigma = 30.0;
  double tl = 2.5;
  int window = 6;
  int threads = 0;
  bool deterministic = false;
  bool keep_lowpass = false;
  bool normalize_input = false;
};

void add_denoise(CLI::App& app, DenoiseFlags& f, std::function<void()>& action) {
  auto* cmd = app.add_subcommand("denoise", "denoise a volume");
  cmd->add_option("--in", f.in, "input volume (.shvol)")->required();
  cmd->add_option("--out", f.out, "output volume (.shvol)")->required();
  f.transform.add_to(cmd);
  cmd->add_option("--sigma", f.sigma, "noise level in [0, 255] intensity units")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tl", f.tl, "threshold level; 2.5 suits OCT, 1.5 suits OCTA")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--method", f.method, "shearlet, median-sub or pixel-avg")
      ->capture_default_str()
      ->check(CLI::IsMember({"shearlet", "median-sub", "pixel-avg"}));
  cmd->add_option("--window", f.window, "pixel-avg axial window")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--stats", f.stats, "write the per-subband threshold table here");
  cmd->add_option("--threads", f.threads, "worker threads, 0 = all cores (capped by SHEARVOL_THREADS)")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  cmd->add_flag("--deterministic", f.deterministic,
                "fixed accumulation order; output independent of thread count");
  cmd->add_flag("--keep-lowpass", f.keep_lowpass, "do not threshold the lowpass subband");
  cmd->add_flag("--normalize", f.normalize_input, "map the input onto [0, 255] first");
  cmd->callback([&f, &action] {
    action = [&f] {
      VolumeGrid volume = read_volume(f.in);
      if (f.normalize_input) volume = normalize(volume);
      VolumeGrid result;
      if (f.method == "median-sub") {
        result = median_subtract(volume);
      } else if (f.method == "pixel-avg") {
        result = pixel_average_axial(volume, f.window);
      } else {
        DenoiseParams params;
        params.sigma = f.sigma;
        params.tl = f.tl;
        params.threshold_lowpass = !f.keep_lowpass;
        params.mode = f.transform.mode == "3d" ? DenoiseMode::kVolume3D : DenoiseMode::kBscan2D;
        const ExecutionPolicy policy{f.threads, f.deterministic};
        const auto config = f.transform.config(volume.dims());
        auto r = f.transform.mode == "3d" ? denoise_volume(volume, config, params, policy)
                                          : denoise_volume_2d(volume, config, params, policy);
        if (!f.stats.empty()) write_text(f.stats, format_stats_table(r.stats));
        result = std::move(r.volume);
      }
      write_volume(f.out, result);
    };
  });
}

// ---- metrics -------------------------------------------------------------

struct MetricsFlags {
  std::string in, ref;
  double data_range = 255.0;
  bool table = false;
  bool snr = false;
  std::vector<std::size_t> slab;
  double inner = 0.6, outer = 2.5;
  std::optional<double> pitch;
  std::vector<double> center;
};

Image snr_image(const VolumeGrid& v, const std::vector<std::size_t>& slab) {
  if (v.dims().nz == 1) return image_from_volume(v);
  FlatSlab bounds{0, v.dims().nz};
  if (!slab.empty()) bounds = {slab[0], slab[1]};
  return enface_project(v, {ProjectionMode::kMax, bounds});
}

void add_metrics(CLI::App& app, MetricsFlags& f, std::ostream& out, std::function<void()>& action) {
  auto* cmd = app.add_subcommand("metrics", "compare a volume or image against a reference");
  cmd->add_option("--in", f.in, "volume or image under test")->required();
  cmd->add_option("--ref", f.ref, "reference (clean) volume or image");
  cmd->add_option("--data-range", f.data_range, "peak value for PSNR and SSIM")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--table", f.table, "aligned table instead of key-value records");
  cmd->add_flag("--snr", f.snr, "OCTA en-face SNR of --in (max projection for volumes)");
  cmd->add_option("--slab", f.slab, "z0,z1 depth slab for the SNR projection")
      ->delimiter(',')
      ->expected(2);
  cmd->add_option("--inner", f.inner, "FAZ diameter in mm")->capture_default_str();
  cmd->add_option("--outer", f.outer, "parafovea outer diameter in mm")->capture_default_str();
  cmd->add_option("--pitch", f.pitch, "en-face pixel pitch in mm (default: file pitch or 3/245)");
  cmd->add_option("--center", f.center, "annulus center x,y in pixels")->delimiter(',')->expected(2);
  cmd->callback([&f, &out, &action] {
    action = [&f, &out] {
      if (f.ref.empty() && !f.snr) throw CLI::ValidationError("--ref", "needs --ref and/or --snr");
      const VolumeGrid a = read_volume(f.in);
      std::vector<MetricRecord> records;
      const std::string dr = "data_range=" + fmt(f.data_range);
      if (!f.ref.empty()) {
        const VolumeGrid b = read_volume(f.ref);
        const double m = mse(a, b);
        const Psnr p = psnr(a, b, f.data_range);
        SsimParams sp;
        sp.data_range = f.data_range;
        double s = 0.0;
        std::string pooling;
        if (a.dims().nz == 1) {
          s = ssim(image_from_volume(a), image_from_volume(b), sp);
          pooling = "image";
        } else {
          s = ssim(a, b, sp);
          pooling = "bscan_mean";
        }
        records.push_back({"mse", m, "pooling=voxels"});
        records.push_back({"psnr", p.db, dr + (p.identical ? " identical=1" : " identical=0")});
        records.push_back({"ssim", s, "window=11 gaussian_sigma=1.5 k1=0.01 k2=0.03 " + dr +
                                          " pooling=" + pooling});
      }
      if (f.snr) {
        AnnulusSpec roi;
        roi.inner_diameter_mm = f.inner;
        roi.outer_diameter_mm = f.outer;
        roi.pixel_pitch_mm = f.pitch ? *f.pitch : (a.pitch().x > 0.0 ? a.pitch().x : 3.0 / 245.0);
        if (!f.center.empty()) roi.center = std::pair{f.center[0], f.center[1]};
        const double v = octa_snr(snr_image(a, f.slab), roi);
        records.push_back({"snr", v, "inner_mm=" + fmt(f.inner) + " outer_mm=" + fmt(f.outer) +
                                         " pitch_mm=" + fmt(roi.pixel_pitch_mm)});
      }
      if (f.table) {
        out << format_table(records, f.in + (f.ref.empty() ? "" : " vs " + f.ref) +
                                         "; mse/psnr pooled over all voxels, ssim averaged over "
                                         "B-scans");
      } else {
        out << format_records(records);
      }
    };
  });
}

// ---- phantom -------------------------------------------------------------

struct PhantomFlags {
  std::string kind = "oct", spec, clean, noisy;
  std::uint64_t seed = 1;
  bool print_spec = false;
};

void add_phantom(CLI::App& app, PhantomFlags& f, std::ostream& out, std::function<void()>& action) {
  auto* cmd = app.add_subcommand("phantom", "generate a clean/noisy phantom pair");
  cmd->add_option("--kind", f.kind, "oct or octa (ignored with --spec)")
      ->capture_default_str()
      ->check(CLI::IsMember({"oct", "octa"}));
  cmd->add_option("--spec", f.spec, "phantom spec file (key = value lines)");
  cmd->add_option("--seed", f.seed, "noise seed")->capture_default_str();
  cmd->add_option("--clean", f.clean, "output path of the clean volume");
  cmd->add_option("--noisy", f.noisy, "output path of the noisy volume");
  cmd->add_flag("--print-spec", f.print_spec, "print the effective spec");
  cmd->callback([&f, &out, &action] {
    action = [&f, &out] {
      if (f.clean.empty() && f.noisy.empty() && !f.print_spec) {
        throw CLI::ValidationError("--clean/--noisy", "nothing to do without an output");
      }
      PhantomSpec spec = f.spec.empty()
                             ? (f.kind == "oct" ? PhantomSpec{OctPhantomSpec{}} : PhantomSpec{OctaPhantomSpec{}})
                             : read_phantom_spec(f.spec);
      if (f.print_spec) out << format_phantom_spec(spec);
      if (f.clean.empty() && f.noisy.empty()) return;
      const PhantomPair pair = generate(spec, f.seed);
      if (!f.clean.empty()) write_volume(f.clean, pair.clean);
      if (!f.noisy.empty()) write_volume(f.noisy, pair.noisy);
    };
  });
}

// ---- project -------------------------------------------------------------

struct ProjectFlags {
  std::string in, out, image, top, bottom, mode = "max";
  std::optional<std::size_t> z0, z1;
  std::vector<double> window;
};

void add_project(CLI::App& app, ProjectFlags& f, std::function<void()>& action) {
  auto* cmd = app.add_subcommand("project", "en-face projection to PGM");
  cmd->add_option("--in", f.in, "input volume")->required();
  cmd->add_option("--out", f.out, "output PGM image")->required();
  cmd->add_option("--image", f.image, "also write the en-face image as .shvol");
  cmd->add_option("--mode", f.mode, "max or mean")
      ->capture_default_str()
      ->check(CLI::IsMember({"max", "mean"}));
  cmd->add_option("--z0", f.z0, "first depth of a flat slab (default 0)");
  cmd->add_option("--z1", f.z1, "end depth of a flat slab, exclusive (default nz)");
  auto* top = cmd->add_option("--top", f.top, "top depth surface (.shvol image)");
  auto* bottom = cmd->add_option("--bottom", f.bottom, "bottom depth surface (.shvol image)");
  top->needs(bottom);
  bottom->needs(top);
  cmd->add_option("--window", f.window, "lo,hi intensity mapped onto 0..255 (default: volume range)")
      ->delimiter(',')
      ->expected(2);
  cmd->callback([&f, &action] {
    action = [&f] {
      if (!f.top.empty() && (f.z0 || f.z1)) {
        throw CLI::ValidationError("--top", "cannot combine depth surfaces with --z0/--z1");
      }
      const VolumeGrid volume = read_volume(f.in);
      SlabSpec slab;
      slab.mode = f.mode == "max" ? ProjectionMode::kMax : ProjectionMode::kMean;
      if (!f.top.empty()) {
        slab.bounds = SurfaceSlab{read_image(f.top), read_image(f.bottom)};
      } else {
        slab.bounds = FlatSlab{f.z0.value_or(0), f.z1.value_or(volume.dims().nz)};
      }
      const Image image = enface_project(volume, slab);
      IntensityRange window = volume.range();
      if (!f.window.empty()) window = {f.window[0], f.window[1]};
      write_pgm(f.out, image, window);
      if (!f.image.empty()) write_image(f.image, image, volume.range());
    };
  });
}

// ---- decompose -----------------------------------------------------------

struct DecomposeFlags {
  std::string in, out_dir;
  TransformFlags transform;
  std::vector<std::string> subbands;
  std::size_t slice = 0;
  bool list = false;
  int threads = 0;
};

std::vector<std::size_t> select_subbands(const ShearletSystem& system,
                                         const std::vector<std::string>& wanted) {
  std::vector<std::size_t> ids;
  if (wanted.empty() || (wanted.size() == 1 && wanted[0] == "all")) {
    for (std::size_t i = 0; i < system.size(); ++i) ids.push_back(i);
    return ids;
  }
  for (const auto& w : wanted) {
    bool found = false;
    for (std::size_t i = 0; i < system.size() && !found; ++i) {
      if (system.index(i).to_string() == w) {
        ids.push_back(i);
        found = true;
      }
    }
    if (found) continue;
    std::size_t used = 0;
    std::size_t id = 0;
    try {
      id = std::stoul(w, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != w.size() || w.empty() || w[0] == '-') {
      throw CLI::ValidationError("--subbands", "unknown subband '" + w + "'");
    }
    if (id >= system.size()) {
      throw BoundsError("--subbands: " + w + " outside [0, " + std::to_string(system.size()) + ")");
    }
    ids.push_back(id);
  }
  return ids;
}

std::string file_stem(std::size_t id, const SubbandIndex& index) {
  std::string name = index.to_string();
  std::replace(name.begin(), name.end(), ',', '_');
  std::ostringstream s;
  s << "sb" << std::setw(3) << std::setfill('0') << id << "_" << name << ".shvol";
  return s.str();
}

void add_decompose(CLI::App& app, DecomposeFlags& f, std::ostream& out,
                   std::function<void()>& action) {
  auto* cmd = app.add_subcommand("decompose", "dump shearlet subbands as volumes");
  cmd->add_option("--in", f.in, "input volume")->required();
  cmd->add_option("--out-dir", f.out_dir, "directory for the subband files");
  f.transform.add_to(cmd);
  cmd->add_option("--subbands", f.subbands, "subband ids or names such as lowpass or j1.p2.k0,0, separated by spaces or ';' (default all)")
      ->delimiter(';');
  cmd->add_option("--slice", f.slice, "B-scan index for --mode 2d")->capture_default_str();
  cmd->add_option("--threads", f.threads, "worker threads")->check(CLI::NonNegativeNumber);
  cmd->add_flag("--list", f.list, "print the subband ids and names");
  cmd->callback([&f, &out, &action] {
    action = [&f, &out] {
      if (f.out_dir.empty() && !f.list) {
        throw CLI::ValidationError("--out-dir", "needs --out-dir and/or --list");
      }
      const VolumeGrid volume = read_volume(f.in);
      const ShearletSystem system = build_system(f.transform.config(volume.dims()));
      const auto ids = select_subbands(system, f.subbands);
      if (f.list) {
        for (std::size_t id : ids) out << id << " " << system.index(id).to_string() << "\n";
      }
      if (f.out_dir.empty()) return;
      const ExecutionPolicy policy{f.threads, false};
      CoefficientStack stack;
      Dims3 dims = volume.dims();
      if (f.transform.mode == "3d") {
        stack = decompose_subbands(volume, system, ids, policy);
      } else {
        const CoefficientStack full = decompose_bscan_2d(volume, system, f.slice, policy);
        for (std::size_t id : ids) {
          stack.indices.push_back(full.indices[id]);
          stack.subbands.push_back(full.subbands[id]);
        }
        dims.ny = 1;
      }
      std::error_code ec;
      fs::create_directories(f.out_dir, ec);
      if (ec) throw UnwritableError("cannot create " + f.out_dir + ": " + ec.message());
      for (std::size_t k = 0; k < ids.size(); ++k) {
        VolumeGrid sb(dims, std::move(stack.subbands[k]));
        sb.set_pitch(volume.pitch());
        write_volume(fs::path(f.out_dir) / file_stem(ids[k], stack.indices[k]), sb);
      }
    };
  });
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Volumetric shearlet denoising toolkit", "shearvol"};
  app.require_subcommand(1);

  std::function<void()> action;
  DenoiseFlags denoise;
  MetricsFlags metrics;
  PhantomFlags phantom;
  ProjectFlags project;
  DecomposeFlags decompose;
  add_denoise(app, denoise, action);
  add_metrics(app, metrics, out, action);
  add_phantom(app, phantom, out, action);
  add_project(app, project, action);
  add_decompose(app, decompose, out, action);

  auto usage = [&]() -> std::string {
    const auto subs = app.get_subcommands();
    return subs.empty() ? app.help() : subs.front()->help();
  };
  auto where = [&]() -> std::string {
    const auto subs = app.get_subcommands();
    return subs.empty() ? "shearvol: " : "shearvol " + subs.front()->get_name() + ": ";
  };

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << usage();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << where() << e.what() << "\n\n" << usage();
    return kUsage;
  }

  try {
    if (action) action();
    return kOk;
  } catch (const CLI::ValidationError& e) {
    err << where() << e.what() << "\n\n" << usage();
    return kUsage;
  } catch (const IoError& e) {
    err << where() << e.what() << "\n";
    return kIo;
  } catch (const Error& e) {
    err << where() << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    err << where() << "unexpected failure: " << e.what() << "\n";
    return kRuntimeFailure;
  }
}

}  // namespace shearvol::cli
