#include "rgbxy/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>

#include <omp.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "rgbxy/error.hpp"
#include "rgbxy/service.hpp"
#include "rgbxy/session.hpp"
#include "rgbxy/video.hpp"

namespace rgbxy {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> template_names() {
  std::vector<std::string> v{"auto"};
  for (TemplateKind k : kAllTemplateKinds) v.emplace_back(to_string(k));
  return v;
}

std::vector<std::string> contrast_names() {
  std::vector<std::string> v;
  for (int i = 0; i <= static_cast<int>(ContrastKind::cold_warm); ++i) {
    v.emplace_back(to_string(static_cast<ContrastKind>(i)));
  }
  return v;
}

std::string read_text(const fs::path& p) {
  const auto bytes = read_file(p);
  return {bytes.begin(), bytes.end()};
}

PaletteOptions palette_options(double rmse255) {
  PaletteOptions o;
  o.rmse_tol = rmse255 / 255.0;
  return o;
}

struct ImageArgs {
  std::string input;
  std::string palette;
  std::string state;
  double rmse = 2.0;
  double xy_scale = 1.0;
};

void add_image_args(CLI::App* sub, ImageArgs& a) {
  sub->add_option("input", a.input, "Input PNG or JPEG")->required()->check(CLI::ExistingFile);
  sub->add_option("--palette", a.palette, "Palette JSON (default: extracted from the image)")
      ->check(CLI::ExistingFile);
  sub->add_option("--rmse", a.rmse, "Palette tolerance in 0-255 units")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  sub->add_option("--state", a.state, "RGBXY decomposition cache; written when missing");
  sub->add_option("--xy-scale", a.xy_scale, "Weight of pixel position in RGBXY space")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
}

EditSession open_session(const ImageArgs& a) {
  Image img = read_image(a.input);
  DecompositionState st;
  if (!a.state.empty() && fs::exists(a.state)) {
    st = deserialize_state(read_file(a.state));
    if (st.xy_scale != a.xy_scale) throw Error("cached state was computed with a different --xy-scale");
  } else {
    DecomposeOptions d;
    d.xy_scale = a.xy_scale;
    st = precompute_rgbxy(img, d);
    if (!a.state.empty()) write_file_atomic(a.state, serialize_state(st));
  }
  EditSession s(std::move(img), std::move(st));
  if (!a.palette.empty()) {
    s.set_palette(palette_from_json(read_text(a.palette)));
  } else {
    s.auto_palette(palette_options(a.rmse));
  }
  return s;
}

void emit(const json& report, const std::string& path, std::ostream& out) {
  const std::string text = report.dump(2) + "\n";
  if (path.empty()) {
    out << text;
  } else {
    write_file_atomic(path, text);
  }
}

std::string layer_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "layer_%02zu.png", i);
  return buf;
}

// Encodes everything first so a failure leaves no files behind.
void write_decomposition(const fs::path& dir, const EditSession& s) {
  std::vector<std::pair<fs::path, std::vector<std::uint8_t>>> files;
  const std::string pal = palette_to_json(s.palette());
  files.emplace_back(dir / "palette.json", std::vector<std::uint8_t>(pal.begin(), pal.end()));
  files.emplace_back(dir / "weights.bin",
                     serialize_weights(s.weights(), s.image().width(), s.image().height()));
  const auto layers = s.layers();
  for (std::size_t i = 0; i < layers.size(); ++i) files.emplace_back(dir / layer_name(i), encode_png(layers[i]));
  files.emplace_back(dir / "reconstruction.png", encode_png(s.render()));
  fs::create_directories(dir);
  for (const auto& [path, bytes] : files) write_file_atomic(path, bytes);
}

json decomposition_summary(const EditSession& s) {
  const Image recon = s.render();
  return {{"palette", colors_json(s.palette())},
          {"weights", s.color_weights()},
          {"q", s.state().q()},
          {"width", s.image().width()},
          {"height", s.image().height()},
          {"rmse", rmse(recon, s.image()) * 255.0}};
}

// Shared tail of the recoloring commands.
struct RecolorArgs {
  std::string out;
  std::string report;
  std::string palette_out;
};

void add_recolor_args(CLI::App* sub, RecolorArgs& a, bool out_required = true) {
  auto* o = sub->add_option("--out", a.out, "Recolored PNG");
  if (out_required) o->required();
  sub->add_option("--report", a.report, "Report JSON path (default: stdout)");
  sub->add_option("--palette-out", a.palette_out, "Write the recolored palette JSON");
}

int finish_recolor(EditSession& s, const PaletteEdit& e, const RecolorArgs& a, std::ostream& out) {
  s.show(e.palette);
  const auto png = encode_png(s.render());
  if (!a.palette_out.empty()) write_file_atomic(a.palette_out, palette_to_json(e.palette));
  write_file_atomic(a.out, png);
  emit(e.report, a.report, out);
  return 0;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Palette-based image decomposition and color harmonization"};
  app.name("rgbxy");
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "OpenMP thread count (0: runtime default)")->check(CLI::NonNegativeNumber);

  std::function<int()> run;

  // palette
  ImageArgs pal_in;
  std::string pal_out;
  auto* pal = app.add_subcommand("palette", "Extract a palette");
  pal->add_option("input", pal_in.input, "Input PNG or JPEG")->required()->check(CLI::ExistingFile);
  pal->add_option("--rmse", pal_in.rmse, "Tolerance in 0-255 units")->check(CLI::NonNegativeNumber)->capture_default_str();
  pal->add_option("--out", pal_out, "Palette JSON")->required();
  pal->callback([&] {
    run = [&] {
      const PaletteReport rep = extract_palette_report(read_image(pal_in.input), palette_options(pal_in.rmse));
      write_file_atomic(pal_out, palette_to_json(rep.palette));
      out << json{{"size", rep.palette.size()},
                  {"rmse", rep.rmse * 255.0},
                  {"initial_vertices", rep.initial_vertices},
                  {"collapses", rep.collapses},
                  {"degenerate", rep.degenerate}}
                 .dump(2)
          << "\n";
      return 0;
    };
  });

  // decompose / relayer
  ImageArgs dec_in;
  std::string dec_out;
  auto* dec = app.add_subcommand("decompose", "Layer decomposition into a directory");
  add_image_args(dec, dec_in);
  dec->add_option("--out", dec_out, "Output directory")->required();
  dec->callback([&] {
    run = [&] {
      const EditSession s = open_session(dec_in);
      write_decomposition(dec_out, s);
      out << decomposition_summary(s).dump(2) << "\n";
      return 0;
    };
  });

  ImageArgs rel_in;
  std::string rel_out;
  auto* rel = app.add_subcommand("relayer", "Decompose with a new palette reusing a cached state");
  add_image_args(rel, rel_in);
  rel->get_option("--palette")->required()->description("New palette JSON");
  rel->get_option("--state")->required()->description("RGBXY decomposition cache from an earlier run");
  rel->add_option("--out", rel_out, "Output directory")->required();
  rel->callback([&] {
    run = [&] {
      const EditSession s = open_session(rel_in);
      write_decomposition(rel_out, s);
      out << decomposition_summary(s).dump(2) << "\n";
      return 0;
    };
  });

  // harmonize
  ImageArgs har_in;
  RecolorArgs har_out;
  std::string har_template = "auto";
  std::vector<std::string> har_kinds;
  double har_beta = 1.0;
  bool fit_only = false;
  const std::vector<std::string> names = template_names();
  auto* har = app.add_subcommand("harmonize", "Hue template harmonization");
  add_image_args(har, har_in);
  har->add_option("--template", har_template, "Template kind or auto")
      ->check(CLI::IsMember(names))
      ->capture_default_str();
  har->add_option("--kinds", har_kinds, "Candidate kinds for auto")
      ->check(CLI::IsMember(std::vector<std::string>(names.begin() + 1, names.end())));
  har->add_option("--beta", har_beta, "Harmonization strength")->capture_default_str();
  har->add_flag("--fit-only", fit_only, "Only report the fitted template");
  add_recolor_args(har, har_out, false);
  har->callback([&] {
    if (!fit_only && har_out.out.empty()) throw UsageError("harmonize: --out is required unless --fit-only");
    run = [&] {
      EditSession s = open_session(har_in);
      const std::vector<double> w = s.color_weights();
      std::vector<TemplateKind> kinds;
      if (har_template != "auto") {
        kinds.push_back(template_kind_from_string(har_template));
      } else if (!har_kinds.empty()) {
        for (const auto& k : har_kinds) kinds.push_back(template_kind_from_string(k));
      } else {
        kinds.assign(kAllTemplateKinds.begin(), kAllTemplateKinds.end());
      }
      const TemplateFit fit = fit_palette(s.palette(), w, kinds);
      if (fit_only) {
        emit({{"template", template_descriptor(fit.tmpl, har_beta)},
              {"D", fit.distance},
              {"weights", w},
              {"palette_in", colors_json(s.palette())}},
             har_out.report, out);
        return 0;
      }
      const HarmonizeSpec spec{fit.tmpl.kind, har_beta};
      return finish_recolor(s, harmonize_edit(s.palette(), w, spec), har_out, out);
    };
  });

  // lc-harmonize
  ImageArgs lc_in;
  RecolorArgs lc_out;
  std::string lc_template = "auto";
  bool per_axis = false;
  auto* lc = app.add_subcommand("lc-harmonize", "Lightness/chroma template harmonization");
  add_image_args(lc, lc_in);
  lc->add_option("--template", lc_template, "LC1..LC6 or auto")
      ->check(CLI::IsMember({"auto", "LC1", "LC2", "LC3", "LC4", "LC5", "LC6"}, CLI::ignore_case))
      ->capture_default_str();
  lc->add_flag("--per-axis", per_axis, "Fit each hue group of the optimal template separately");
  add_recolor_args(lc, lc_out);
  lc->callback([&] {
    run = [&] {
      EditSession s = open_session(lc_in);
      std::optional<LcKind> kind;
      if (CLI::detail::to_lower(lc_template) != "auto") kind = lc_kind_from_string(lc_template);
      return finish_recolor(s, lc_edit(s.palette(), s.color_weights(), kind, per_axis), lc_out, out);
    };
  });

  // contrast
  ImageArgs con_in;
  RecolorArgs con_out;
  std::string con_kind;
  double con_beta = 1.0;
  auto* con = app.add_subcommand("contrast", "Contrast operators");
  add_image_args(con, con_in);
  con->add_option("--kind", con_kind, "Contrast kind")->required()->check(CLI::IsMember(contrast_names()));
  con->add_option("--beta", con_beta, "Strength")->capture_default_str();
  add_recolor_args(con, con_out);
  con->callback([&] {
    run = [&] {
      EditSession s = open_session(con_in);
      const PaletteEdit e =
          contrast_edit(s.palette(), s.color_weights(), contrast_kind_from_string(con_kind), con_beta);
      return finish_recolor(s, e, con_out, out);
    };
  });

  // transfer
  ImageArgs tr_in;
  RecolorArgs tr_out;
  std::string tr_ref, tr_ref_palette, tr_mode = "transfer";
  auto* tr = app.add_subcommand("transfer", "Palette transfer from a reference");
  add_image_args(tr, tr_in);
  auto* ref_opt = tr->add_option("--ref", tr_ref, "Reference image")->check(CLI::ExistingFile);
  auto* refp_opt = tr->add_option("--ref-palette", tr_ref_palette, "Reference palette JSON; optional \"weights\"")
                       ->check(CLI::ExistingFile);
  ref_opt->excludes(refp_opt);
  tr->add_option("--mode", tr_mode, "align or transfer")
      ->check(CLI::IsMember({"align", "transfer"}))
      ->capture_default_str();
  add_recolor_args(tr, tr_out);
  tr->callback([&] {
    if (tr_ref.empty() && tr_ref_palette.empty()) throw UsageError("transfer: give --ref or --ref-palette");
    run = [&] {
      Palette ref;
      std::vector<double> ref_w;
      if (!tr_ref.empty()) {
        ImageArgs r;
        r.input = tr_ref;
        r.rmse = tr_in.rmse;
        r.xy_scale = tr_in.xy_scale;
        const EditSession rs = open_session(r);
        ref = rs.palette();
        ref_w = rs.color_weights();
      } else {
        const std::string text = read_text(tr_ref_palette);
        ref = palette_from_json(text);
        const json j = json::parse(text);
        ref_w = j.contains("weights") ? j["weights"].get<std::vector<double>>() : uniform_weights(ref.size());
        if (ref_w.size() != ref.size()) throw FormatError("reference weights do not match its colors");
      }
      EditSession s = open_session(tr_in);
      const PaletteEdit e =
          transfer_edit(s.palette(), s.color_weights(), ref, ref_w, transfer_mode_from_string(tr_mode));
      return finish_recolor(s, e, tr_out, out);
    };
  });

  // video harmonize
  std::string v_frames, v_out, v_template = "auto", v_report;
  double v_beta = 1.0, v_rmse = 2.0, v_xy = 1.0;
  int v_workers = 1;
  bool v_stream = false;
  auto* vid = app.add_subcommand("video", "Image-sequence operations");
  vid->require_subcommand(1);
  auto* vh = vid->add_subcommand("harmonize", "Harmonize a frame directory with one global palette");
  vh->add_option("--frames", v_frames, "Directory of PNG frames")->required()->check(CLI::ExistingDirectory);
  vh->add_option("--template", v_template, "Template kind or auto")
      ->check(CLI::IsMember(names))
      ->capture_default_str();
  vh->add_option("--beta", v_beta, "Harmonization strength")->capture_default_str();
  vh->add_option("--out", v_out, "Output directory")->required();
  vh->add_option("--rmse", v_rmse, "Palette tolerance in 0-255 units")->check(CLI::NonNegativeNumber)->capture_default_str();
  vh->add_option("--xy-scale", v_xy, "Weight of pixel position")->check(CLI::NonNegativeNumber)->capture_default_str();
  vh->add_option("--workers", v_workers, "Frames processed in parallel")->check(CLI::PositiveNumber)->capture_default_str();
  vh->add_flag("--stream", v_stream, "Recompute frame weights instead of keeping them in memory");
  vh->add_option("--report", v_report, "Report JSON path (default: stdout)");
  vh->callback([&] {
    run = [&] {
      const auto paths = list_frames(v_frames);
      std::vector<Image> frames;
      for (const auto& p : paths) frames.push_back(read_image(p));
      HarmonizeSpec spec;
      if (v_template != "auto") spec.kind = template_kind_from_string(v_template);
      spec.beta = v_beta;
      VideoOptions vo;
      vo.palette = palette_options(v_rmse);
      vo.decompose.xy_scale = v_xy;
      vo.retain_weights = !v_stream;
      vo.workers = v_workers;
      const VideoResult r = harmonize_video(frames, spec, vo);
      std::vector<std::vector<std::uint8_t>> pngs;
      for (const auto& f : r.frames) pngs.push_back(encode_png(f));
      fs::create_directories(v_out);
      for (std::size_t i = 0; i < paths.size(); ++i) write_file_atomic(fs::path(v_out) / paths[i].filename(), pngs[i]);
      emit({{"template", template_descriptor(r.harmonization.fit.tmpl, v_beta)},
            {"D", r.harmonization.fit.distance},
            {"frames", paths.size()},
            {"palette_rmse", r.global.rmse * 255.0},
            {"weights", r.weights},
            {"palette_in", colors_json(r.global.palette)},
            {"palette_out", colors_json(r.harmonization.palette)}},
           v_report, out);
      return 0;
    };
  });

  // serve
  ServiceOptions so;
  double s_rmse = 2.0;
  auto* srv = app.add_subcommand("serve", "Websocket editing service");
  srv->add_option("--host", so.host, "Bind address")->capture_default_str();
  srv->add_option("--port", so.port, "Port")->capture_default_str();
  srv->add_option("--max-pixels", so.max_pixels, "Largest accepted image")->capture_default_str();
  srv->add_option("--max-precomputes", so.max_precomputes, "Concurrent precomputes")
      ->check(CLI::Range(1, 64))
      ->capture_default_str();
  srv->add_option("--preview-edge", so.preview_edge, "Preview long edge in pixels")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  srv->add_option("--rmse", s_rmse, "Palette tolerance in 0-255 units")->check(CLI::NonNegativeNumber)->capture_default_str();
  srv->add_option("--xy-scale", so.decompose.xy_scale, "Weight of pixel position")->check(CLI::NonNegativeNumber);
  srv->callback([&] {
    run = [&] {
      so.palette = palette_options(s_rmse);
      Server server(so);
      const unsigned short port = server.start();
      server.stop_on_signals();
      out << "listening on ws://" << so.host << ":" << port << std::endl;
      server.wait();
      return 0;
    };
  });

  std::vector<std::string> argv_store{"rgbxy"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  if (threads > 0) omp_set_num_threads(threads);
  try {
    return run ? run() : 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cli_main(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace rgbxy
