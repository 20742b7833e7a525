#include "nanophot/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "nanophot/architecture.hpp"
#include "nanophot/device.hpp"
#include "nanophot/error.hpp"
#include "nanophot/explorer.hpp"
#include "nanophot/gates.hpp"
#include "nanophot/imaging.hpp"
#include "nanophot/serialize.hpp"
#include "nanophot/stochastic.hpp"

namespace nanophot {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kDefaultSeed = 20210101;

std::string join(const fs::path& dir, const std::string& name) { return (dir / name).string(); }

fs::path ensure_dir(const std::string& dir) {
  fs::path p(dir.empty() ? "." : dir);
  fs::create_directories(p);
  return p;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

DetuningCalibration load_calibration(const std::string& path) {
  if (path.empty()) throw InvalidParameter("missing calibration (--calibration)");
  return calibration_from_json(read_json_file(path));
}

// ---- calibrate -------------------------------------------------------------

struct CalibrateArgs {
  std::string csv;
  double q_p_ref = 700.0;
  double lambda_p_ref = 1568.8;
};

void cmd_calibrate(const CalibrateArgs& a, const fs::path& out_dir, std::ostream& out) {
  const auto pts = read_calibration_csv(a.csv);
  const DetuningCalibration cal = fit_calibration(pts, a.q_p_ref, a.lambda_p_ref);
  write_text_file(join(out_dir, "calibration.json"), dump(to_json(cal)));
  std::ostringstream res;
  res << "# units: power uW, detunings nm\n";
  res << "power_uw,detuning_nm,poly_nm,closed_form_nm,residual_nm\n";
  res << std::setprecision(10);
  for (const auto& p : pts)
    res << p.power_uw << ',' << p.detuning_nm << ',' << cal.polynomial(p.power_uw) << ','
        << cal.closed_form(p.power_uw) << ',' << cal.polynomial(p.power_uw) - p.detuning_nm
        << '\n';
  write_text_file(join(out_dir, "calibration_residuals.csv"), res.str());
  out << "fit rms " << cal.residual_rms << " nm; sat_scale " << cal.sat_scale << "; power_scale "
      << cal.power_scale << " uW; closed-form deviation " << cal.closed_form_deviation << "\n";
  if (!cal.monotone) out << "warning: fitted polynomial is not monotone\n";
  if (cal.monotone_constrained)
    out << "note: free cubic was not monotone; refitted with zero slope at the top power\n";
  if (cal.degenerate) out << "warning: degenerate calibration (no detuning)\n";
  if (!cal.closed_form_ok()) out << "warning: closed form deviates from the polynomial by >10%\n";
}

// ---- gate ------------------------------------------------------------------

struct GateArgs {
  std::string kind = "not";
  std::string calibration;
  double q_s = 2000.0;
  double m = 2.0;
  double lambda_s = 1542.0;
  double detuning = 0.35;
  double floor = 0.1;
  double fsr = 24.0;
  int sweep_steps = 50;
};

void print_table(std::ostream& out, const TruthTable& t) {
  out << "combination,transmission,expected\n";
  for (std::size_t k = 0; k < t.transmission.size(); ++k)
    out << k << ',' << t.transmission[k] << ',' << t.expected[k] << '\n';
  out << "threshold " << t.threshold << "; ER " << t.er_db << " dB; "
      << (t.consistent ? "truth table holds" : "truth table violated") << '\n';
}

void cmd_gate(const GateArgs& a, const fs::path& out_dir, std::ostream& out) {
  const DetuningCalibration cal = load_calibration(a.calibration);
  std::ostringstream sweep;
  sweep << "# units: detuning nm, transmissions linear, er dB\n";
  sweep << "detuning_nm,t_high,t_low,er_db\n";
  sweep << std::setprecision(10);
  const Nanocavity probe{a.lambda_s, a.fsr, a.q_s, a.m, a.floor};
  const double sat = max_detuning(probe, cal);
  if (a.kind == "not") {
    print_table(out, not_truth_table(make_not_gate(cal, a.lambda_s, a.q_s, a.detuning, a.m, a.fsr,
                                                   a.floor),
                                     cal));
    for (int k = 1; k <= a.sweep_steps; ++k) {
      const double dl = sat * k / (a.sweep_steps + 1);
      const NotGate g = make_not_gate(cal, a.lambda_s, a.q_s, dl, a.m, a.fsr, a.floor);
      const double hi = not_transmission(g, cal, 0), lo = not_transmission(g, cal, 1);
      sweep << dl << ',' << hi << ',' << lo << ',' << gate_extinction_ratio(hi, lo) << '\n';
    }
  } else if (a.kind == "xor") {
    const XorGate g = make_xor_gate(cal, a.lambda_s, a.q_s, a.detuning, a.m, a.fsr, a.floor);
    if (!g.linear_pumping)
      out << "warning: one pump gives noticeably more than half the two-pump shift\n";
    print_table(out, xor_truth_table(g, cal));
    for (int k = 1; k <= a.sweep_steps; ++k) {
      const double dl = sat * k / (a.sweep_steps + 1);
      const XorGate s = make_xor_gate(cal, a.lambda_s, a.q_s, dl, a.m, a.fsr, a.floor);
      const double hi = xor_transmission(s, cal, 0, 1);
      const double lo = std::max(xor_transmission(s, cal, 0, 0), xor_transmission(s, cal, 1, 1));
      sweep << dl << ',' << hi << ',' << lo << ',' << (hi >= lo ? gate_extinction_ratio(hi, lo) : 0.0)
            << '\n';
    }
  } else if (a.kind == "mux") {
    print_table(out, mux_truth_table(make_mux_gate(cal, a.lambda_s, a.q_s, a.detuning, a.m,
                                                   a.fsr, a.floor),
                                     cal));
    for (int k = 1; k <= a.sweep_steps; ++k) {
      const double dl = sat * k / (a.sweep_steps + 1);
      const MuxGate g = make_mux_gate(cal, a.lambda_s, a.q_s, dl, a.m, a.fsr, a.floor);
      // Second input passes with select 0 and is blocked with select 1.
      const double l2 = a.lambda_s - dl;
      const double hi = mux_transmission(g, cal, 0, l2), lo = mux_transmission(g, cal, 1, l2);
      sweep << dl << ',' << hi << ',' << lo << ',' << gate_extinction_ratio(hi, lo) << '\n';
    }
  } else {
    throw InvalidParameter("unknown gate kind: " + a.kind);
  }
  write_text_file(join(out_dir, "gate_" + a.kind + "_sweep.csv"), sweep.str());
}

// ---- explore ---------------------------------------------------------------

struct ExploreArgs {
  std::string calibration;
  double olp_input = 4.0;
  double target_ber = 0.1;
  double xor_target_ber = 0.1;
  double kappa = 0.0;  // 0: calibrate from the NOT anchor
  int bsl = 512;
  int steps = 100;
  std::vector<std::string> overrides;
};

void cmd_explore(const ExploreArgs& a, const fs::path& out_dir, std::ostream& out) {
  const DetuningCalibration cal = load_calibration(a.calibration);
  FlowInputs in;
  in.olp_input = a.olp_input;
  in.target_ber = a.target_ber;
  in.xor_target_ber = a.xor_target_ber;
  in.bsl = a.bsl;

  json base{{"m", in.m},   {"lambda_s1", in.lambda_s1}, {"il", in.il},
            {"er_mod", in.er_mod}, {"fsr", in.fsr},   {"floor", in.floor},
            {"n_stages", in.n_stages}};
  for (const auto& o : a.overrides) {
    apply_override(base, o);
    const std::string key = o.substr(0, o.find('='));
    if (!base.contains(key) || key == "olp_input")
      throw InvalidParameter("field cannot be set before exploration: " + key);
  }
  for (const auto& [key, v] : base.items())
    if (!v.is_number()) throw InvalidParameter("field '" + key + "' must be numeric");
  in.m = base["m"].get<double>();
  in.lambda_s1 = base["lambda_s1"].get<double>();
  in.il = base["il"].get<double>();
  in.er_mod = base["er_mod"].get<double>();
  in.fsr = base["fsr"].get<double>();
  in.floor = base["floor"].get<double>();
  in.n_stages = base["n_stages"].get<int>();

  NoiseAnchor anchor;
  anchor.m = in.m;
  anchor.fsr = in.fsr;
  anchor.floor = in.floor;
  in.kappa = a.kappa > 0.0 ? a.kappa : calibrate_kappa(cal, anchor);

  in.xor_grid.q.steps = in.xor_grid.x.steps = a.steps;
  in.stage_grids = default_stage_grids(in.n_stages);
  for (auto& g : in.stage_grids) g.q.steps = g.x.steps = a.steps;

  const FlowResult r = run_design_flow(in, cal);
  {
    std::ofstream f(join(out_dir, "xor_sweep.csv"));
    write_sweep_csv(f, r.xor_table, "delta_lambda_xor");
  }
  for (std::size_t s = 0; s < r.stage_tables.size(); ++s) {
    std::ofstream f(join(out_dir, "stage" + std::to_string(s + 1) + "_sweep.csv"));
    write_sweep_csv(f, r.stage_tables[s], "wls");
  }
  json doc = to_json(r.point);
  doc["kappa_per_uw"] = in.kappa;
  doc["failing_stage"] = r.failing_stage < 0 ? json(nullptr) : json(r.failing_stage + 1);
  doc["degenerate_target"] = r.degenerate_target;
  doc["target_ber"] = a.target_ber;
  doc["diagnostics"] = r.diagnostics;
  write_text_file(join(out_dir, "design_point.json"), dump(doc));
  if (r.failing_stage < 0 || r.point.design.n_stages == in.n_stages) {
    try {
      std::ofstream f(join(out_dir, "plan.csv"));
      write_plan_csv(f, make_plan(r.point.design));
    } catch (const InvalidParameter&) {
      // partial design: no plan
    }
  }
  const auto& d = r.point.design;
  out << "Q_xor " << d.q_s_xor << ", delta_lambda_xor " << d.delta_lambda_xor << " nm\n";
  for (std::size_t n = 0; n < d.wls.size(); ++n)
    out << "stage " << n + 1 << ": Q " << d.q_s_mux[n] << ", WLS " << d.wls[n] << " nm, pump "
        << d.olp_pump_mux[n] << " uW"
        << (n < r.point.stage_ber.size() ? ", BER " + std::to_string(r.point.stage_ber[n]) : "")
        << '\n';
  out << "total laser power " << r.point.total_laser_power_uw << " uW; "
      << (r.point.valid ? "valid" : "invalid") << '\n';
  for (const auto& msg : r.diagnostics) out << "note: " << msg << '\n';
}

// ---- image -----------------------------------------------------------------

struct ImageArgs {
  std::string design;
  std::string calibration;
  std::string input;
  std::string output = "edges.pgm";
  int test_card = 0;
  int bsl = 512;
  double ber = -1.0;
  bool heatmaps = false;
  bool ascii = false;
  std::vector<int> dump_pixel;
  std::vector<std::string> overrides;
};

void dump_streams(const GrayImage& img, int r, int c, int bsl, std::uint64_t seed,
                  std::ostream& out) {
  if (r < 1 || c < 1 || r >= img.rows - 1 || c >= img.cols - 1)
    throw InvalidParameter("dumped pixel must be interior");
  const Window w = window_at(img, r, c);
  const SobelWiring wiring = SobelWiring::default_wiring();
  const Lfsr l = Lfsr::maximal8(static_cast<std::uint32_t>(1 + pixel_seed(seed, r, c) % 255));
  const auto size = static_cast<std::size_t>(bsl);
  std::vector<BitStream> rows;
  for (const auto& p : wiring.pairs) {
    const auto a = w[static_cast<std::size_t>((p.ar + 1) * 3 + p.ac + 1)];
    const auto b = w[static_cast<std::size_t>((p.br + 1) * 3 + p.bc + 1)];
    rows.push_back(xor_streams(sng_generate(a, size, l), sng_generate(b, size, l)));
  }
  for (std::size_t k = 0; k < rows.size(); ++k)
    out << "xor" << k + 1 << ' ' << rows[k].to_string() << '\n';
  for (int n = 0; n < 3; ++n) {
    const BitStream sel = select_bit_stream(l, n, size);
    out << "sel" << n + 1 << ' ' << sel.to_string() << '\n';
    std::vector<BitStream> next;
    // Select 1 passes the first input of each pair.
    for (std::size_t k = 0; k + 1 < rows.size(); k += 2)
      next.push_back(mux_streams(rows[k + 1], rows[k], sel));
    rows = std::move(next);
  }
  out << "out " << rows[0].to_string() << '\n';
}

void cmd_image(const ImageArgs& a, std::uint64_t seed, const fs::path& out_dir, std::ostream& out) {
  if (a.design.empty()) throw InvalidParameter("missing design (--design)");
  json dj = read_json_file(a.design);
  DesignPoint point;
  if (!a.overrides.empty()) {
    json& target = dj.contains("design") ? dj["design"] : dj;
    for (const auto& o : a.overrides) apply_override(target, o);
  }
  point = design_point_from_json(dj);
  if (!a.calibration.empty())
    point = evaluate_design(point.design, load_calibration(a.calibration), a.bsl);
  if (a.ber >= 0.0) point.ber_override = a.ber;
  if (!(point.output_ber() >= 0.0 && point.output_ber() <= 1.0))
    throw InvalidParameter("design carries no usable BER; pass --ber or --calibration");
  point.total_laser_power_uw = point.design.total_laser_power();

  GrayImage img;
  if (!a.input.empty())
    img = pgm_read(a.input);
  else if (a.test_card > 0)
    img = synthetic_test_card(a.test_card, a.test_card, seed);
  else
    throw InvalidParameter("missing input image (--input or --test-card)");

  if (!a.dump_pixel.empty()) {
    if (a.dump_pixel.size() != 2) throw InvalidParameter("--dump-streams takes ROW COL");
    dump_streams(img, a.dump_pixel[0], a.dump_pixel[1], a.bsl, seed, out);
  }
  const ImageResult r = process_image(img, point, a.bsl, seed);
  const PgmFormat fmt = a.ascii ? PgmFormat::Ascii : PgmFormat::Binary;
  pgm_write(join(out_dir, a.output), r.output, fmt);
  json rep = to_json(r.report);
  rep["total_laser_power_uw"] = point.total_laser_power_uw;
  write_text_file(join(out_dir, "report.json"), dump(rep));
  if (a.heatmaps) {
    pgm_write(join(out_dir, "ed_bsl.pgm"), error_heatmap(r.report.ed_bsl, img.rows, img.cols), fmt);
    pgm_write(join(out_dir, "ed_trans.pgm"), error_heatmap(r.report.ed_trans, img.rows, img.cols),
              fmt);
    pgm_write(join(out_dir, "ed_total.pgm"), error_heatmap(r.report.ed_total, img.rows, img.cols),
              fmt);
  }
  out << "PSNR " << r.report.psnr_total << " dB, MSE " << r.report.mse_total << ", BER "
      << r.report.ber_injected << ", " << r.report.time_per_pixel_ns << " ns/pixel, "
      << r.report.energy_per_pixel_nj << " nJ/pixel\n";
}

// ---- report ----------------------------------------------------------------

void flatten(const json& j, const std::string& prefix, std::map<std::string, std::string>& row) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, row);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i + 1), row);
  } else if (j.is_string()) {
    row[prefix] = j.get<std::string>();
  } else {
    row[prefix] = j.dump();
  }
}

void cmd_report(const std::vector<std::string>& inputs, const std::string& output,
                const fs::path& out_dir, std::ostream& out) {
  if (inputs.empty()) throw InvalidParameter("report needs at least one JSON input");
  std::vector<std::map<std::string, std::string>> rows;
  std::vector<std::string> columns{"source"};
  for (const auto& path : inputs) {
    std::map<std::string, std::string> row;
    flatten(read_json_file(path), "", row);
    row.erase("diagnostics");
    for (const auto& [k, v] : row)
      if (std::find(columns.begin(), columns.end(), k) == columns.end()) columns.push_back(k);
    row["source"] = fs::path(path).filename().string();
    rows.push_back(std::move(row));
  }
  std::ostringstream csv;
  csv << "# units follow the field names (_uw microwatt, _nm nanometre, _nj nanojoule, _ns "
         "nanosecond, _db decibel)\n";
  for (std::size_t c = 0; c < columns.size(); ++c) csv << (c ? "," : "") << columns[c];
  csv << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const auto it = row.find(columns[c]);
      std::string v = it == row.end() ? "" : it->second;
      if (v.find(',') != std::string::npos) v = "\"" + v + "\"";
      csv << (c ? "," : "") << v;
    }
    csv << '\n';
  }
  write_text_file(join(out_dir, output), csv.str());
  out << "merged " << rows.size() << " documents into " << output << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Photonic nanocavity stochastic-computing simulator"};
  app.require_subcommand(1);
  std::string out_dir_arg = ".";
  std::uint64_t seed = kDefaultSeed;
  app.add_option("--out-dir", out_dir_arg, "Output directory (created if absent)");
  app.add_option("--seed", seed, "Global seed");

  CalibrateArgs ca;
  auto* cal = app.add_subcommand("calibrate", "Fit the detuning calibration from a CSV");
  cal->add_option("--csv", ca.csv, "CSV with header power_uw,detuning_nm")->required();
  cal->add_option("--q-p-ref", ca.q_p_ref, "Pump-side Q of the measured device");
  cal->add_option("--lambda-p-ref", ca.lambda_p_ref, "Pump resonance of the measured device (nm)");

  GateArgs ga;
  auto* gate = app.add_subcommand("gate", "Truth table and ER sweep of one gate");
  gate->add_option("--kind", ga.kind, "not | xor | mux")
      ->check(CLI::IsMember({"not", "xor", "mux"}));
  gate->add_option("--calibration", ga.calibration, "Calibration JSON")->required();
  gate->add_option("--q-s", ga.q_s, "Signal-side Q");
  gate->add_option("--m", ga.m, "Figure of merit Q_S/Q_P");
  gate->add_option("--lambda-s", ga.lambda_s, "Signal wavelength (nm)");
  gate->add_option("--detuning", ga.detuning, "Design detuning, XOR split or MUX shift (nm)");
  gate->add_option("--floor", ga.floor, "On-resonance transmission");
  gate->add_option("--fsr", ga.fsr, "Pump minus signal resonance (nm)");
  gate->add_option("--sweep-steps", ga.sweep_steps, "Points in the ER sweep");

  ExploreArgs ea;
  auto* exp = app.add_subcommand("explore", "Run the design-space exploration flow");
  exp->add_option("--calibration", ea.calibration, "Calibration JSON");
  exp->add_option("--olp-input", ea.olp_input, "Input laser power (uW)");
  exp->add_option("--target-ber", ea.target_ber, "BER targeted at the detector");
  exp->add_option("--xor-target-ber", ea.xor_target_ber, "BER used for the XOR sweep");
  exp->add_option("--kappa", ea.kappa, "Noise constant R/I per uW (default: calibrated)");
  exp->add_option("--bsl", ea.bsl, "Bit-stream length for energy and time");
  exp->add_option("--grid-steps", ea.steps, "Steps per sweep axis")->check(CLI::Range(1, 2000));
  exp->add_option("--set", ea.overrides, "Override key=value");

  ImageArgs ia;
  auto* img = app.add_subcommand("image", "Stochastic edge detection of a PGM image");
  img->add_option("--design", ia.design, "DesignPoint or design JSON");
  img->add_option("--calibration", ia.calibration, "Re-evaluate the design with this calibration");
  img->add_option("--input", ia.input, "Input PGM (P2 or P5)");
  img->add_option("--test-card", ia.test_card, "Use a synthetic NxN test card instead");
  img->add_option("--output", ia.output, "Output PGM file name");
  img->add_option("--bsl", ia.bsl, "Bit-stream length")->check(CLI::PositiveNumber);
  img->add_option("--ber", ia.ber, "Injected BER (overrides the design)");
  img->add_flag("--heatmaps", ia.heatmaps, "Write ED maps as PGM heat maps");
  img->add_flag("--ascii", ia.ascii, "Write P2 instead of P5");
  img->add_option("--dump-streams", ia.dump_pixel, "Print the bit streams of pixel ROW COL")
      ->expected(2);
  img->add_option("--set", ia.overrides, "Override key=value");

  std::vector<std::string> rep_inputs;
  std::string rep_output = "summary.csv";
  auto* rep = app.add_subcommand("report", "Merge JSON documents into one CSV");
  rep->add_option("inputs", rep_inputs, "JSON files")->required();
  rep->add_option("--output", rep_output, "CSV file name");

  std::vector<const char*> argv;
  for (const auto& s : args) argv.push_back(s.c_str());
  if (argv.empty()) argv.push_back("nanophot");
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    const fs::path out_dir = ensure_dir(out_dir_arg);
    if (*cal) cmd_calibrate(ca, out_dir, out);
    if (*gate) cmd_gate(ga, out_dir, out);
    if (*exp) cmd_explore(ea, out_dir, out);
    if (*img) cmd_image(ia, seed, out_dir, out);
    if (*rep) cmd_report(rep_inputs, rep_output, out_dir, out);
  } catch (const InvalidState& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace nanophot
