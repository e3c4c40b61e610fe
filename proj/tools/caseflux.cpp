#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "caseflux/density.hpp"
#include "caseflux/greens.hpp"
#include "caseflux/montecarlo.hpp"
#include "caseflux/spectrum.hpp"

using namespace caseflux;
using nlohmann::json;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitConvergence = 3;

std::string fmt(Real v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Shared medium selection: presets, a key-value config file, and plain flags.
struct MediumOpts {
  Real mu_a = 0.03;
  Real mu_s = 100.0;
  Real f1 = 0.0;
  std::optional<Real> hg_g;
  int N = 1;
  std::string preset;
  std::string config_path;

  void attach(CLI::App* cmd) {
    cmd->add_option("--mu-a", mu_a, "absorption coefficient (1/cm)");
    cmd->add_option("--mu-s", mu_s, "scattering coefficient (1/cm)");
    cmd->add_option("--f1", f1, "linear phase-function coefficient");
    cmd->add_option("--hg-g", hg_g, "Henyey-Greenstein g (f_l = g^l up to N)");
    cmd->add_option("--N", N, "phase-function order for --hg-g");
    cmd->add_option("--case", preset, "parameter preset i, ii or iii")
        ->check(CLI::IsMember({"i", "ii", "iii"}));
    cmd->add_option("--config", config_path,
                    "key-value config file (mu_a, mu_s, f1 or hg_g, N)");
  }

  OpticalMedium build() const {
    Real a = mu_a, s = mu_s, lin = f1;
    std::optional<Real> g = hg_g;
    int order = N;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw std::invalid_argument("cannot open config " + config_path);
      std::string line;
      while (std::getline(in, line)) {
        const auto h = line.find('#');
        if (h != std::string::npos) line.erase(h);
        std::replace(line.begin(), line.end(), '=', ' ');
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        Real val;
        if (!(ls >> val))
          throw std::invalid_argument("config key without value: " + key);
        if (key == "mu_a") a = val;
        else if (key == "mu_s") s = val;
        else if (key == "f1") lin = val;
        else if (key == "hg_g") g = val;
        else if (key == "N") order = static_cast<int>(val);
        else throw std::invalid_argument("unknown config key: " + key);
      }
    }
    if (preset == "i") return OpticalMedium::linear(0.03, 100.0, 0.0);
    if (preset == "ii") return OpticalMedium::linear(0.03, 100.0, 0.3);
    if (preset == "iii") return OpticalMedium::linear(0.3, 100.0, 0.3);
    if (g) {
      std::vector<Real> f(static_cast<std::size_t>(order) + 1);
      Real p = 1.0;
      for (auto& fl : f) {
        fl = p;
        p *= *g;
      }
      return OpticalMedium(a, s, f);
    }
    return OpticalMedium::linear(a, s, lin);
  }
};

struct GridOpts {
  Real zmin = 0.5;
  Real zmax = 10.0;
  int nz = 50;
  void attach(CLI::App* cmd) {
    cmd->add_option("--zmin", zmin, "smallest z (mean free paths)");
    cmd->add_option("--zmax", zmax, "largest z (mean free paths)");
    cmd->add_option("--nz", nz, "number of log-spaced z points");
  }
  std::vector<Real> build() const {
    if (!(zmin > 0.0) || !(zmax > zmin) || nz < 1)
      throw std::invalid_argument("bad z grid");
    return default_density_grid(nz, zmin, zmax);
  }
};

std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path.empty()) return std::cout;
  file.open(path);
  if (!file) throw std::invalid_argument("cannot open output " + path);
  return file;
}

// A density route that reports a large refinement residual has not converged.
void check_profile(const DensityProfile& p) {
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    if (!std::isfinite(p.values[i]))
      throw std::runtime_error("density value not finite");
    if (p.error[i] > 1e-4 * std::abs(p.values[i]) + 1e-12)
      throw std::runtime_error("density refinement residual too large");
  }
}

void emit_density(std::ostream& os, const std::vector<Real>& zs,
                  const DensityProfile* pc, const DensityProfile* pf) {
  os << "z,U_case,U_fourier,rel_diff\n";
  for (std::size_t i = 0; i < zs.size(); ++i) {
    os << fmt(zs[i]) << ',';
    os << (pc ? fmt(pc->values[i]) : "") << ',';
    os << (pf ? fmt(pf->values[i]) : "") << ',';
    if (pc && pf)
      os << fmt(std::abs(pc->values[i] - pf->values[i]) /
                std::abs(pc->values[i]));
    os << '\n';
  }
}

int run(int argc, char** argv) {
  CLI::App app{"Singular-eigenfunction transport solutions in an infinite medium"};
  app.require_subcommand(1);

  std::string out_path;
  app.add_option("--out", out_path, "write CSV/JSON here instead of stdout")
      ->configurable(false);

  // spectrum
  auto* sp = app.add_subcommand("spectrum", "discrete eigenvalues as JSON");
  MediumOpts sp_med;
  sp_med.attach(sp);

  // density-point / density-line
  auto* dp = app.add_subcommand("density-point", "point-source energy density");
  auto* dl = app.add_subcommand("density-line", "line-source energy density");
  MediumOpts dp_med, dl_med;
  GridOpts dp_grid, dl_grid;
  std::string dp_method = "case", dl_method = "case";
  Real dl_ell = 1.0;
  dp_med.attach(dp);
  dp_grid.attach(dp);
  dp->add_option("--method", dp_method)->check(CLI::IsMember({"case", "fourier", "both"}));
  dl_med.attach(dl);
  dl_grid.attach(dl);
  dl->add_option("--method", dl_method)->check(CLI::IsMember({"case", "fourier", "both"}));
  dl->add_option("--ell", dl_ell, "line length (cm)");

  // green1d / green3d
  auto* g1 = app.add_subcommand("green1d", "plane-integrated Green's function");
  auto* g3 = app.add_subcommand("green3d", "full Green's function");
  MediumOpts g1_med, g3_med;
  g1_med.attach(g1);
  g3_med.attach(g3);
  Real g_z = 1.0, g_z0 = 0.0, g_th = 0.0, g_ph = 0.0, g_th0 = 0.0, g_ph0 = 0.0;
  Real g_dx = 0.0, g_dy = 0.0;
  GreensSettings g3_set;
  for (auto* g : {g1, g3}) {
    g->add_option("--z", g_z, "detector depth (mean free paths)");
    g->add_option("--z0", g_z0, "source depth");
    g->add_option("--theta", g_th, "detector polar angle");
    g->add_option("--phi", g_ph, "detector azimuth");
    g->add_option("--theta0", g_th0, "source polar angle");
    g->add_option("--phi0", g_ph0, "source azimuth");
  }
  g3->add_option("--dx", g_dx, "transverse offset x");
  g3->add_option("--dy", g_dy, "transverse offset y");
  g3->add_option("--nu-order", g3_set.nu_order, "spectral quadrature order");
  g3->add_option("--q-azimuthal", g3_set.q_azimuthal, "azimuthal resolution");
  g3->add_option("--q-panel-order", g3_set.q_panel_order, "radial panel order");

  // mc
  auto* mc = app.add_subcommand("mc", "Monte Carlo point-source density");
  MediumOpts mc_med;
  mc_med.attach(mc);
  McConfig mc_cfg;
  mc_cfg.photons = 1000000;
  mc_cfg.bins = 50;
  mc_cfg.rmax = 10.0;
  mc->add_option("--photons", mc_cfg.photons, "photon count");
  mc->add_option("--bins", mc_cfg.bins, "radial shell count");
  mc->add_option("--rmax", mc_cfg.rmax, "outer shell radius (mean free paths)");
  mc->add_option("--seed", mc_cfg.seed, "RNG seed");
  mc->add_option("--roulette", mc_cfg.roulette, "roulette weight threshold");

  // compare
  auto* cp = app.add_subcommand("compare", "cross-method density comparison");
  MediumOpts cp_med;
  GridOpts cp_grid;
  long long cp_photons = 0;
  std::string cp_source = "point";
  Real cp_ell = 1.0;
  std::uint64_t cp_seed = 1;
  cp_med.attach(cp);
  cp_grid.attach(cp);
  cp->add_option("--source", cp_source)->check(CLI::IsMember({"point", "line"}));
  cp->add_option("--ell", cp_ell, "line length (cm)");
  cp->add_option("--mc-photons", cp_photons, "add a Monte Carlo column (point only)");
  cp->add_option("--seed", cp_seed, "Monte Carlo seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  std::ofstream file;
  std::ostream& os = open_out(out_path, file);

  if (sp->parsed()) {
    const OpticalMedium med = sp_med.build();
    json j;
    j["medium"] = {{"mu_a", med.mu_t() - med.albedo() * med.mu_t()},
                   {"mu_s", med.albedo() * med.mu_t()},
                   {"albedo", med.albedo()},
                   {"order", med.order()}};
    j["spectra"] = json::array();
    for (int m = -med.order(); m <= med.order(); ++m) {
      const SpectrumData spec = find_discrete(m, med);
      j["spectra"].push_back({{"m", m},
                              {"eigenvalues", spec.eigenvalues},
                              {"norms", spec.norms},
                              {"residuals", spec.residuals}});
    }
    os << j.dump(2) << '\n';
    return 0;
  }

  if (dp->parsed()) {
    const OpticalMedium med = dp_med.build();
    const auto zs = dp_grid.build();
    std::optional<DensityProfile> pc, pf;
    if (dp_method != "fourier") {
      pc = density_point(zs, med);
      check_profile(*pc);
    }
    if (dp_method != "case") {
      pf = density_point_fourier(zs, med);
      check_profile(*pf);
    }
    emit_density(os, zs, pc ? &*pc : nullptr, pf ? &*pf : nullptr);
    return 0;
  }

  if (dl->parsed()) {
    const OpticalMedium med = dl_med.build();
    const auto zs = dl_grid.build();
    std::optional<DensityProfile> pc, pf;
    if (dl_method != "fourier") {
      pc = density_line(zs, med, dl_ell);
      check_profile(*pc);
    }
    if (dl_method != "case") {
      pf = density_line_fourier(zs, med, dl_ell);
      check_profile(*pf);
    }
    emit_density(os, zs, pc ? &*pc : nullptr, pf ? &*pf : nullptr);
    return 0;
  }

  if (g1->parsed() || g3->parsed()) {
    const OpticalMedium med = (g1->parsed() ? g1_med : g3_med).build();
    GreensEvaluator ge(med, g3_set);
    const Direction s{g_th, g_ph}, s0{g_th0, g_ph0};
    if (g1->parsed()) {
      const Real v = green_1d(ge, g_z, s, g_z0, s0);
      os << "z,z0,theta,phi,theta0,phi0,G\n";
      os << fmt(g_z) << ',' << fmt(g_z0) << ',' << fmt(g_th) << ',' << fmt(g_ph)
         << ',' << fmt(g_th0) << ',' << fmt(g_ph0) << ',' << fmt(v) << '\n';
    } else {
      const Real v = green_3d(ge, g_dx, g_dy, g_z, s, g_z0, s0);
      if (!std::isfinite(v)) throw std::runtime_error("green3d value not finite");
      os << "dx,dy,z,z0,theta,phi,theta0,phi0,G\n";
      os << fmt(g_dx) << ',' << fmt(g_dy) << ',' << fmt(g_z) << ',' << fmt(g_z0)
         << ',' << fmt(g_th) << ',' << fmt(g_ph) << ',' << fmt(g_th0) << ','
         << fmt(g_ph0) << ',' << fmt(v) << '\n';
    }
    return 0;
  }

  if (mc->parsed()) {
    mc_cfg.medium = mc_med.build();
    const McResult res = simulate_point(mc_cfg);
    os << "r_center,U_est,stderr\n";
    for (std::size_t i = 0; i < res.values.size(); ++i)
      os << fmt(res.r_center[i]) << ',' << fmt(res.values[i]) << ','
         << fmt(res.stderrs[i]) << '\n';
    return 0;
  }

  if (cp->parsed()) {
    const OpticalMedium med = cp_med.build();
    const auto zs = cp_grid.build();
    const bool iso = (med.order() == 0) ||
                     (med.order() >= 1 && med.f(1) == 0.0);
    std::optional<DensityProfile> pc, pf;
    if (cp_source == "point") {
      pc = density_point(zs, med);
      if (iso) pf = density_point_fourier(zs, med);
    } else {
      pc = density_line(zs, med, cp_ell);
      if (iso) pf = density_line_fourier(zs, med, cp_ell);
    }
    check_profile(*pc);
    if (pf) check_profile(*pf);
    std::optional<McResult> mres;
    if (cp_photons > 0 && cp_source == "point") {
      McConfig cfg;
      cfg.medium = med;
      cfg.photons = cp_photons;
      cfg.bins = 64;
      cfg.rmax = cp_grid.zmax;
      cfg.seed = cp_seed;
      cfg.roulette = 1e-2;
      mres = simulate_point(cfg);
    }
    os << "z,U_case,U_fourier,rel_diff" << (mres ? ",U_mc,mc_stderr" : "") << '\n';
    for (std::size_t i = 0; i < zs.size(); ++i) {
      os << fmt(zs[i]) << ',' << fmt(pc->values[i]) << ',';
      if (pf)
        os << fmt(pf->values[i]) << ','
           << fmt(std::abs(pc->values[i] - pf->values[i]) /
                  std::abs(pc->values[i]));
      else
        os << ',';
      if (mres) {
        const Real dr = cp_grid.zmax / 64;
        const int k = std::min(63, static_cast<int>(zs[i] / dr));
        os << ',' << fmt(mres->values[static_cast<std::size_t>(k)]) << ','
           << fmt(mres->stderrs[static_cast<std::size_t>(k)]);
      }
      os << '\n';
    }
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConvergence;
  }
}
