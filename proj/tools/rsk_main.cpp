// rsk: range-separated tensor decompositions of radial Green kernels on 3D
// Cartesian grids, discretized Dirac deltas, multiparticle potentials, and
// regularized Poisson / PBE right-hand sides.
//
// Subcommands: quadrature, project, split, assemble, delta, solve, oracle.
// CSV goes to --out (or stdout) for plot data; JSON reports carry the
// resolved configuration for reproducibility. Exit codes: 0 ok, 1 validation
// failure, 2 numerical failure.

#include <CLI11.hpp>
#include <Eigen/Core>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "rsk/analytic.hpp"
#include "rsk/io.hpp"
#include "rsk/laplacian.hpp"
#include "rsk/pbe.hpp"
#include "rsk/poisson.hpp"
#include "rsk/projection.hpp"
#include "rsk/quadrature.hpp"
#include "rsk/range_separation.hpp"
#include "rsk/tucker.hpp"

using json = nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;

std::ostream& open_out(std::ofstream& file, const std::string& path) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw std::runtime_error("cannot open output file: " + path);
    return file;
}

rsk::RadialKernel make_kernel(const std::string& name, double kappa, double beta, double scale) {
    if (name == "newton") return rsk::RadialKernel::newton(scale);
    if (name == "yukawa") return rsk::RadialKernel::yukawa(kappa, scale);
    if (name == "invpow") return rsk::RadialKernel::inverse_power(beta, scale);
    throw std::invalid_argument("unknown kernel: " + name);
}

std::vector<double> geomspace(double lo, double hi, int count) {
    std::vector<double> out;
    for (int i = 0; i < count; ++i) out.push_back(lo * std::pow(hi / lo, i / (count - 1.0)));
    return out;
}

json base_config(const json& extra) {
    json cfg = extra;
    cfg["schemaVersion"] = kSchemaVersion;
    return cfg;
}

struct DeltaGridResult {
    int n;
    int R_l;
    double sigma;
    double supportRadius;
    double mass;
};

/// Single-particle delta pipeline on one grid: reference split, operator on
/// the reference grid, window to the target centered at the middle cell.
DeltaGridResult delta_on_grid(int n, double b, int M, double C0, double sigmaCells, int explicitRl,
                              double delta, rsk::DiscreteDelta* windowed = nullptr,
                              rsk::GridSpec* gridOut = nullptr) {
    rsk::GridSpec grid(b, n);
    rsk::GridSpec refg = rsk::reference_grid(grid);
    auto rule = rsk::build_sinc_rule(rsk::RadialKernel::newton(1.0 / (4.0 * M_PI)), M, C0);
    auto reft = rsk::project_kernel(rule, refg);
    const double sigma = sigmaCells * grid.h();
    rsk::RsSplit split = explicitRl >= 0
                             ? rsk::split_kernel_tensor(rule, reft, explicitRl)
                             : rsk::split_kernel_tensor(rule, reft, sigma, delta);
    rsk::DiscreteDelta d = rsk::build_delta(split);
    rsk::Index3 mid{(n + 1) / 2, (n + 1) / 2, (n + 1) / 2};
    rsk::DiscreteDelta w;
    w.longPart = rsk::shift_window(d.longPart, mid, grid);
    w.shortPart = rsk::shift_window(d.shortPart, mid, grid);
    w.full = rsk::shift_window(d.full, mid, grid);

    // effective support radius of the long part at threshold 1e-3 max
    Eigen::VectorXd dense = rsk::dense_of(w.longPart);
    const double threshold = 1e-3 * dense.cwiseAbs().maxCoeff();
    double radius = 0.0;
    long idx = 0;
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            for (int k = 1; k <= n; ++k, ++idx) {
                if (std::abs(dense[idx]) <= threshold) continue;
                Eigen::Vector3d x(grid.center(i), grid.center(j), grid.center(k));
                radius = std::max(radius, x.norm());
            }
    // entries are cell integrals of the density: their sum is the mass
    double mass = rsk::dense_of(w.full).sum();

    if (windowed) *windowed = std::move(w);
    if (gridOut) *gridOut = grid;
    return {n, split.R_l, sigma, radius, mass};
}

// cross-section values are emitted in density units (entry / h^3)
void write_axis_csv(std::ostream& out, const rsk::GridSpec& grid, const rsk::DiscreteDelta& d) {
    out << "x,delta_full,delta_s,delta_l\n";
    const int mid = (grid.n + 1) / 2;
    const double ih3 = 1.0 / std::pow(grid.h(), 3);
    for (int i = 1; i <= grid.n; ++i) {
        rsk::Index3 idx{i, mid, mid};
        out << grid.center(i) << "," << d.full.entry(idx) * ih3 << ","
            << d.shortPart.entry(idx) * ih3 << "," << d.longPart.entry(idx) * ih3 << "\n";
    }
}

void write_field_axis_csv(std::ostream& out, const std::vector<const rsk::GridField*>& fields,
                          const std::vector<std::string>& names) {
    const rsk::GridSpec& grid = fields[0]->grid;
    out << "x";
    for (const auto& name : names) out << "," << name;
    out << "\n";
    const int mid = (grid.n + 1) / 2;
    for (int i = 1; i <= grid.n; ++i) {
        out << grid.center(i);
        for (const auto* f : fields) out << "," << f->at(i, mid, mid);
        out << "\n";
    }
}

int run(int argc, char** argv) {
    CLI::App app{"range-separated tensor kernels"};
    app.require_subcommand(1);

    if (const char* threads = std::getenv("RS_KERNELS_THREADS"))
        Eigen::setNbThreads(std::max(1, std::atoi(threads)));

    // shared options
    std::string kernelName = "newton", particlesPath, outPath;
    double kappa = 1.0, beta = 1.0, C0 = 3.0, b = 1.0;
    double sigma = -1.0, deltaThresh = 1e-4, eps = 1e-6;
    int M = 24, n = 129, Rl = -1;
    std::uint64_t seed = 0x5eed;

    // --- quadrature ---
    auto* quad = app.add_subcommand("quadrature", "sinc-quadrature Gaussian sums");
    bool sweep = false, halfRange = false;
    std::vector<int> Ms = {4, 9, 16, 25, 36, 49};
    double aCut = 0.1, rMax = 10.0;
    int rPoints = 60;
    quad->add_option("--kernel", kernelName, "newton|yukawa|invpow");
    quad->add_option("--kappa", kappa);
    quad->add_option("--beta", beta);
    quad->add_option("--M", M);
    quad->add_option("--C0", C0);
    quad->add_flag("--sweep", sweep, "emit (M, maxRelError) table");
    quad->add_flag("--half", halfRange, "half-range rule (k >= 0, doubled weights)");
    quad->add_option("--Ms", Ms, "sweep ranks");
    quad->add_option("--a", aCut, "lower cutoff radius");
    quad->add_option("--r-max", rMax);
    quad->add_option("--r-points", rPoints);
    quad->add_option("--out", outPath);

    // --- project ---
    auto* project = app.add_subcommand("project", "grid projection of the kernel");
    std::string dumpPrefix;
    project->add_option("--kernel", kernelName);
    project->add_option("--kappa", kappa);
    project->add_option("--beta", beta);
    project->add_option("--n", n);
    project->add_option("--b", b);
    project->add_option("--M", M);
    project->add_option("--C0", C0);
    project->add_option("--dump-factors", dumpPrefix, "CSV prefix, one file per mode");
    project->add_option("--out", outPath);

    // --- split ---
    auto* split = app.add_subcommand("split", "short/long-range splitting");
    std::string criterionName = "max";
    split->add_option("--kernel", kernelName);
    split->add_option("--n", n);
    split->add_option("--b", b);
    split->add_option("--M", M);
    split->add_option("--C0", C0);
    split->add_option("--sigma", sigma);
    split->add_option("--delta", deltaThresh);
    split->add_option("--criterion", criterionName, "max|l1");
    split->add_option("--Rl", Rl, "explicit splitting index (overrides criterion)");
    split->add_option("--out", outPath);

    // --- assemble ---
    auto* assemble = app.add_subcommand("assemble", "multiparticle RS assembly");
    assemble->add_option("--particles", particlesPath)->required();
    assemble->add_option("--n", n);
    assemble->add_option("--b", b);
    assemble->add_option("--M", M);
    assemble->add_option("--C0", C0);
    assemble->add_option("--sigma", sigma);
    assemble->add_option("--delta", deltaThresh);
    assemble->add_option("--eps", eps);
    assemble->add_option("--seed", seed);
    assemble->add_option("--out", outPath);

    // --- delta ---
    auto* deltaCmd = app.add_subcommand("delta", "operator-dependent discretized Dirac delta");
    std::vector<int> grids;
    double sigmaCells = 3.0;
    std::string csvPath;
    deltaCmd->add_option("--n", n);
    deltaCmd->add_option("--b", b);
    deltaCmd->add_option("--M", M);
    deltaCmd->add_option("--C0", C0);
    deltaCmd->add_option("--Rl", Rl, "explicit splitting index");
    deltaCmd->add_option("--sigma-cells", sigmaCells,
                         "criterion support radius in mesh units (default 3)");
    deltaCmd->add_option("--delta", deltaThresh);
    deltaCmd->add_option("--eps", eps);
    deltaCmd->add_option("--grids", grids, "grid sizes for the support-radius sweep");
    deltaCmd->add_option("--csv", csvPath, "cross-section CSV path");
    deltaCmd->add_option("--out", outPath);

    // --- solve ---
    auto* solve = app.add_subcommand("solve", "regularized elliptic solves");
    std::string mode = "poisson", csvPrefix;
    double sigmaVdw = 0.15, epsM = 1.0, epsS = 80.0, kappaDebye = 0.0;
    solve->add_option("--particles", particlesPath)->required();
    solve->add_option("--n", n);
    solve->add_option("--b", b);
    solve->add_option("--M", M);
    solve->add_option("--C0", C0);
    solve->add_option("--sigma", sigma);
    solve->add_option("--delta", deltaThresh);
    solve->add_option("--eps", eps);
    solve->add_option("--mode", mode, "poisson|pbe-rhs");
    solve->add_option("--sigma-vdw", sigmaVdw);
    solve->add_option("--eps-m", epsM);
    solve->add_option("--eps-s", epsS);
    solve->add_option("--kappa", kappaDebye);
    solve->add_option("--csv-prefix", csvPrefix, "cross-section CSV path prefix");
    solve->add_option("--out", outPath);

    // --- oracle ---
    auto* oracleCmd = app.add_subcommand("oracle", "pointwise analytic kernels");
    std::string oracleKernel = "yukawa";
    std::vector<double> at = {1.0, 0.0, 0.0}, drift = {0.0, 0.0, 0.0};
    double lambda = 1.0, lameLambda = 1.0, lameMu = 1.0, viscosity = 1.0;
    int dim = 3;
    oracleCmd->add_option("--kernel", oracleKernel,
                          "erf-potential|erf-gradient|gd|yukawa|biharmonic|kelvin|stokeslet|"
                          "stokes-pressure|eta0");
    oracleCmd->add_option("--at", at)->expected(3);
    oracleCmd->add_option("--lambda", lambda);
    oracleCmd->add_option("--kappa", kappa);
    oracleCmd->add_option("--d", dim);
    oracleCmd->add_option("--lame-lambda", lameLambda);
    oracleCmd->add_option("--lame-mu", lameMu);
    oracleCmd->add_option("--nu", viscosity);
    oracleCmd->add_option("--drift", drift)->expected(3);
    oracleCmd->add_option("--out", outPath);

    CLI11_PARSE(app, argc, argv);
    std::ofstream file;

    if (*quad) {
        auto kernel = make_kernel(kernelName, kappa, beta, 1.0);
        std::ostream& out = open_out(file, outPath);
        auto rGrid = geomspace(aCut, rMax, rPoints);
        if (sweep) {
            auto table = rsk::convergence_sweep(kernel, Ms, rGrid, aCut, C0, halfRange);
            out << "M,maxRelError\n";
            for (const auto& row : table) out << row.M << "," << row.maxRelError << "\n";
        } else {
            auto rule = rsk::build_sinc_rule(kernel, M, C0, halfRange);
            out << "r,approx,exact,relError\n";
            for (double r : rGrid) {
                double approx = rsk::eval_gaussian_sum(rule, r);
                double exact = kernel(r);
                out << r << "," << approx << "," << exact << ","
                    << std::abs(approx - exact) / std::abs(exact) << "\n";
            }
        }
        return 0;
    }

    if (*project) {
        auto kernel = make_kernel(kernelName, kappa, beta, 1.0 / (4.0 * M_PI));
        rsk::GridSpec grid(b, n);
        auto rule = rsk::build_sinc_rule(kernel, M, C0);
        auto t = rsk::project_kernel(rule, grid);
        if (!dumpPrefix.empty()) {
            for (int mode3 = 0; mode3 < 3; ++mode3) {
                std::ofstream dump(dumpPrefix + "_mode" + std::to_string(mode3 + 1) + ".csv");
                rsk::dump_factor_csv(dump, t, mode3);
            }
        }
        json report = base_config({{"n", n},
                                   {"b", b},
                                   {"h", grid.h()},
                                   {"R", t.rank()},
                                   {"kernel", kernelName},
                                   {"M", M},
                                   {"C0", C0}});
        open_out(file, outPath) << report.dump(2) << "\n";
        return 0;
    }

    if (*split) {
        auto kernel = make_kernel(kernelName, kappa, beta, 1.0 / (4.0 * M_PI));
        rsk::GridSpec grid(b, n);
        auto rule = rsk::build_sinc_rule(kernel, M, C0);
        auto t = rsk::project_kernel(rule, rsk::reference_grid(grid));
        const double sig = sigma > 0 ? sigma : 2.0 * grid.h();
        rsk::RsSplit s =
            Rl >= 0 ? rsk::split_kernel_tensor(rule, t, Rl)
                    : rsk::split_kernel_tensor(rule, t, sig, deltaThresh,
                                               criterionName == "l1" ? rsk::SplitCriterion::L1Norm
                                                                     : rsk::SplitCriterion::MaxNorm);
        json report = base_config({{"n", n},
                                   {"b", b},
                                   {"M", M},
                                   {"C0", C0},
                                   {"kernel", kernelName},
                                   {"criterion", criterionName},
                                   {"sigma", sig},
                                   {"delta", deltaThresh},
                                   {"R", t.rank()},
                                   {"R_l", s.R_l},
                                   {"R_s", rule.M - s.R_l},
                                   {"longCount", s.longPart.rank()},
                                   {"shortCount", s.shortPart.rank()},
                                   {"noTermSatisfied", s.noTermSatisfied}});
        open_out(file, outPath) << report.dump(2) << "\n";
        return 0;
    }

    if (*assemble) {
        rsk::ParticleSystem sys = rsk::load_particles(particlesPath);
        rsk::GridSpec grid(b, n);
        sys.validate(grid);
        auto rule = rsk::build_sinc_rule(rsk::RadialKernel::newton(1.0 / (4.0 * M_PI)), M, C0);
        auto reft = rsk::project_kernel(rule, rsk::reference_grid(grid));
        const double sig = sigma > 0 ? sigma : 2.0 * grid.h();
        rsk::RsSplit s = rsk::split_kernel_tensor(rule, reft, sig, deltaThresh);
        rsk::AssembleReport rep;
        auto [rs, tk] = rsk::assemble_multiparticle(s, sys, grid, eps, &rep, seed);
        json report = base_config(
            {{"n", n},
             {"b", b},
             {"M", M},
             {"C0", C0},
             {"sigma", sig},
             {"delta", deltaThresh},
             {"eps", eps},
             {"seed", seed},
             {"particles", particlesPath},
             {"N", rep.N},
             {"R_l", rep.R_l},
             {"R_s", rep.R_s},
             {"gamma", rep.gamma},
             {"tuckerRanks", {rep.tuckerRanks[0], rep.tuckerRanks[1], rep.tuckerRanks[2]}},
             {"canonicalRankAfter", rep.canonicalRankAfter},
             {"storageBytes", rep.storageDoubles * static_cast<long>(sizeof(double))},
             {"maxSnapDisplacement", rep.maxSnapDisplacement}});
        open_out(file, outPath) << report.dump(2) << "\n";
        return 0;
    }

    if (*deltaCmd) {
        if (grids.empty()) grids = {n};
        json gridReports = json::array();
        bool first = true;
        for (int gn : grids) {
            rsk::DiscreteDelta w;
            rsk::GridSpec grid;
            DeltaGridResult res = delta_on_grid(gn, b, M, C0, sigmaCells, Rl, deltaThresh,
                                                first ? &w : nullptr, first ? &grid : nullptr);
            if (first && !csvPath.empty()) {
                std::ofstream csv(csvPath);
                write_axis_csv(csv, grid, w);
            }
            gridReports.push_back({{"n", res.n},
                                   {"R_l", res.R_l},
                                   {"sigma", res.sigma},
                                   {"supportRadius", res.supportRadius},
                                   {"mass", res.mass}});
            first = false;
        }
        json report = base_config(
            {{"b", b},
             {"M", M},
             {"C0", C0},
             {"sigmaCells", sigmaCells},
             {"delta", deltaThresh},
             {"explicitRl", Rl},
             {"boundary", "homogeneous Dirichlet, positive-definite -A applied as delta = (-A) P"},
             {"grids", gridReports}});
        open_out(file, outPath) << report.dump(2) << "\n";
        return 0;
    }

    if (*solve) {
        rsk::ParticleSystem sys = rsk::load_particles(particlesPath);
        rsk::GridSpec grid(b, n);
        sys.validate(grid);
        const double sig = sigma > 0 ? sigma : 4.0 * grid.h();

        if (mode == "pbe-rhs") {
            rsk::PbeConfig cfg;
            cfg.epsM = epsM;
            cfg.epsS = epsS;
            cfg.kappa = kappaDebye;
            cfg.sigmaVdw = sigmaVdw;
            cfg.charges = sys;
            auto [rho, uShort, rep] =
                rsk::pbe_regularize_rhs(cfg, grid, M, C0, std::min(sig, sigmaVdw), deltaThresh, eps);
            if (!csvPrefix.empty()) {
                std::ofstream csv(csvPrefix + "_fields.csv");
                write_field_axis_csv(csv, {&rho, &uShort}, {"rho_long", "u_short"});
            }
            json report = base_config(
                {{"mode", mode},
                 {"n", n},
                 {"b", b},
                 {"M", M},
                 {"C0", C0},
                 {"sigma", std::min(sig, sigmaVdw)},
                 {"sigmaVdw", sigmaVdw},
                 {"epsM", epsM},
                 {"epsS", epsS},
                 {"kappa", kappaDebye},
                 {"delta", deltaThresh},
                 {"eps", eps},
                 {"N", rep.N},
                 {"R_l", rep.R_l},
                 {"R_s", rep.R_s},
                 {"gamma", rep.gamma},
                 {"uShortMax", rep.uShortMax},
                 {"interfaceMax", rep.interfaceMax},
                 {"interfaceNormalDiffMax", rep.interfaceNormalDiffMax},
                 {"rhoLongMax", rep.rhoLongMax},
                 {"cellsAboveThresholdOutside", rep.cellsAboveThresholdOutside},
                 {"rhoLongTuckerRanks",
                  {rep.rhoLongTuckerRanks[0], rep.rhoLongTuckerRanks[1], rep.rhoLongTuckerRanks[2]}},
                 {"rhoLongRank", rep.rhoLongRank}});
            open_out(file, outPath) << report.dump(2) << "\n";
            return 0;
        }

        // poisson: charges become grid impulses
        auto rule = rsk::build_sinc_rule(rsk::RadialKernel::newton(1.0 / (4.0 * M_PI)), M, C0);
        auto reft = rsk::project_kernel(rule, rsk::reference_grid(grid));
        rsk::RsSplit s = rsk::split_kernel_tensor(rule, reft, sig, deltaThresh);
        const int gamma = static_cast<int>(std::ceil(sig / grid.h()));
        auto K = rsk::window_short_reference(s.shortPart, gamma);
        rsk::GridField f(grid);
        for (const auto& p : sys.particles) {
            rsk::Index3 c = rsk::snap_to_grid(grid, p.center);
            f.at(c[0], c[1], c[2]) += p.charge;
        }
        auto [u, rep] = rsk::regularized_poisson(f, K);
        if (!csvPrefix.empty()) {
            rsk::GridField us = rsk::short_convolve(K, f);
            rsk::GridField fbar = rsk::modified_rhs(f, us);
            std::ofstream csv(csvPrefix + "_fields.csv");
            write_field_axis_csv(csv, {&u, &us, &fbar}, {"u", "u_s", "fbar"});
        }
        json report = base_config({{"mode", mode},
                                   {"n", n},
                                   {"b", b},
                                   {"M", M},
                                   {"C0", C0},
                                   {"sigma", sig},
                                   {"delta", deltaThresh},
                                   {"eps", eps},
                                   {"N", sys.N()},
                                   {"R_l", s.R_l},
                                   {"gamma", rep.gamma},
                                   {"residual", rep.residual},
                                   {"suppFDistance", rep.suppFDistance},
                                   {"suppFbarDistance", rep.suppFbarDistance},
                                   {"usBoundaryMax", rep.usBoundaryMax},
                                   {"maxRelDiffVsDirect", rep.maxRelDiffVsDirect},
                                   {"distanceHypothesisHolds", rep.distanceHypothesisHolds}});
        open_out(file, outPath) << report.dump(2) << "\n";
        return 0;
    }

    if (*oracleCmd) {
        Eigen::Vector3d x(at[0], at[1], at[2]);
        json value;
        if (oracleKernel == "erf-potential") {
            value = rsk::erf_potential(lambda, x);
        } else if (oracleKernel == "erf-gradient") {
            Eigen::Vector3d g = rsk::erf_potential_gradient(lambda, x);
            value = {g[0], g[1], g[2]};
        } else if (oracleKernel == "gd") {
            value = rsk::g_d(dim, lambda, x.norm());
        } else {
            rsk::AnalyticKernel kernel;
            if (oracleKernel == "yukawa") kernel.family = rsk::GreenFamily::Yukawa;
            else if (oracleKernel == "biharmonic") kernel.family = rsk::GreenFamily::Biharmonic;
            else if (oracleKernel == "kelvin") kernel.family = rsk::GreenFamily::KelvinSomigliana;
            else if (oracleKernel == "stokeslet") kernel.family = rsk::GreenFamily::Stokeslet;
            else if (oracleKernel == "stokes-pressure")
                kernel.family = rsk::GreenFamily::StokesPressure;
            else if (oracleKernel == "eta0") kernel.family = rsk::GreenFamily::Eta0;
            else throw std::invalid_argument("unknown oracle kernel: " + oracleKernel);
            kernel.kappa = kappa;
            kernel.lame_lambda = lameLambda;
            kernel.lame_mu = lameMu;
            kernel.viscosity = viscosity;
            kernel.drift = Eigen::Vector3d(drift[0], drift[1], drift[2]);
            rsk::GreenValue v = rsk::green_eval(kernel, x);
            if (v.kind == rsk::GreenValue::Kind::Scalar) value = v.scalar;
            else if (v.kind == rsk::GreenValue::Kind::Vector)
                value = {v.vector[0], v.vector[1], v.vector[2]};
            else {
                value = json::array();
                for (int r = 0; r < 3; ++r)
                    value.push_back({v.matrix(r, 0), v.matrix(r, 1), v.matrix(r, 2)});
            }
        }
        json report = base_config({{"kernel", oracleKernel}, {"at", at}, {"value", value}});
        open_out(file, outPath) << report.dump(2) << "\n";
        return 0;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const rsk::CompressionError& e) {
        std::cerr << "numerical-failure: " << e.what() << " bestResidual=" << e.bestResidual
                  << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
