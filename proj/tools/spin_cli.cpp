// Copyright 2026 The spin-inversion Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// spin: generate matrices, invert them, sweep block sizes, and compare
// against the cost model.
//
// Exit codes: 0 ok, 2 numerical failure, 3 I/O or format failure,
// 4 bad arguments.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "spin/spin.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 2;
constexpr int kExitIo = 3;
constexpr int kExitArgs = 4;

std::size_t effective_cores(std::size_t flag) {
  return spin::ExecConfig::with_env_override({flag, true}).cores;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw spin::FormatError("cannot open '" + path + "' for writing");
  return os;
}

std::vector<spin::Algorithm> parse_algorithms(const std::string& list) {
  std::vector<spin::Algorithm> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t comma = std::min(list.find(',', start), list.size());
    out.push_back(spin::parse_algorithm(list.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed-style block matrix inversion benchmarks"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a random block matrix");
  std::size_t gen_n = 0, gen_bs = 0;
  std::uint64_t gen_seed = 0;
  std::string gen_kind = "spd", gen_out;
  gen->add_option("--n", gen_n)->required();
  gen->add_option("--block-size", gen_bs)->required();
  gen->add_option("--seed", gen_seed)->required();
  gen->add_option("--kind", gen_kind)
      ->check(CLI::IsMember({"spd", "dd", "uniform"}));
  gen->add_option("--out", gen_out)->required();

  // invert
  auto* inv = app.add_subcommand("invert", "Invert a SPINMAT1 matrix");
  std::string inv_in, inv_alg = "spin", inv_out, inv_report;
  std::size_t inv_bs = 0, inv_cores = 1;
  inv->add_option("--in", inv_in)->required();
  inv->add_option("--algorithm", inv_alg)
      ->check(CLI::IsMember({"spin", "lu"}));
  inv->add_option("--block-size", inv_bs);
  inv->add_option("--cores", inv_cores);
  inv->add_option("--out", inv_out)->required();
  inv->add_option("--report", inv_report);

  // sweep
  auto* sw = app.add_subcommand("sweep", "Time both algorithms over b");
  std::size_t sw_n = 0, sw_cores = 1, sw_repeats = 3;
  std::uint64_t sw_seed = 1;
  std::string sw_algs = "spin,lu", sw_kind = "spd", sw_out;
  std::vector<std::size_t> sw_b{2, 4, 8, 16, 32};
  sw->add_option("--n", sw_n)->required();
  sw->add_option("--algorithms", sw_algs);
  sw->add_option("--b", sw_b)->delimiter(',');
  sw->add_option("--cores", sw_cores);
  sw->add_option("--repeats", sw_repeats);
  sw->add_option("--seed", sw_seed);
  sw->add_option("--kind", sw_kind)
      ->check(CLI::IsMember({"spd", "dd", "uniform"}));
  sw->add_option("--out", sw_out)->required();

  // model
  auto* mod = app.add_subcommand("model", "Print the cost breakdown");
  std::string mod_alg = "spin";
  std::size_t mod_n = 0, mod_b = 0, mod_cores = 1;
  mod->add_option("--algorithm", mod_alg)
      ->check(CLI::IsMember({"spin", "lu"}));
  mod->add_option("--n", mod_n)->required();
  mod->add_option("--b", mod_b)->required();
  mod->add_option("--cores", mod_cores);

  // compare
  auto* cmp = app.add_subcommand("compare", "Calibrate the model to a sweep");
  std::string cmp_sweep, cmp_out, cmp_alg = "spin";
  std::size_t cmp_n = 0, cmp_cores = 1;
  cmp->add_option("--sweep", cmp_sweep)->required();
  cmp->add_option("--n", cmp_n)->required();
  cmp->add_option("--cores", cmp_cores);
  cmp->add_option("--algorithm", cmp_alg)
      ->check(CLI::IsMember({"spin", "lu"}));
  cmp->add_option("--out", cmp_out)->required();

  // scale
  auto* sc = app.add_subcommand("scale", "Wall clock over core counts");
  std::string sc_in, sc_alg = "spin", sc_out;
  std::vector<std::size_t> sc_cores{1, 2, 4, 8};
  std::size_t sc_repeats = 3;
  sc->add_option("--in", sc_in)->required();
  sc->add_option("--algorithm", sc_alg)
      ->check(CLI::IsMember({"spin", "lu"}));
  sc->add_option("--cores", sc_cores)->delimiter(',');
  sc->add_option("--repeats", sc_repeats);
  sc->add_option("--out", sc_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitArgs;
  }

  try {
    if (*gen) {
      const spin::GenSpec spec{gen_n, gen_bs, gen_seed,
                               spin::parse_matrix_kind(gen_kind)};
      spin::save_matrix(gen_out, spin::gen(spec));
    } else if (*inv) {
      spin::BlockMatrix a = spin::load_matrix(inv_in);
      if (inv_bs != 0 && inv_bs != a.block_size()) {
        a = spin::partition(spin::densify(a), inv_bs);
      }
      spin::Executor ex(spin::ExecConfig{effective_cores(inv_cores), true});
      auto out = spin::run_inversion(a, spin::parse_algorithm(inv_alg), ex);
      if (!inv_report.empty()) {
        auto os = open_out(inv_report);
        spin::write_records(os, {out.record});
      }
      if (out.record.status == "singular") {
        std::cerr << "spin: singular leading block\n";
        return kExitNumerical;
      }
      spin::save_matrix(inv_out, out.inverse);
    } else if (*sw) {
      spin::SweepConfig cfg;
      cfg.n = sw_n;
      cfg.algorithms = parse_algorithms(sw_algs);
      cfg.b_values = sw_b;
      cfg.cores = effective_cores(sw_cores);
      cfg.repeats = sw_repeats;
      cfg.seed = sw_seed;
      cfg.kind = spin::parse_matrix_kind(sw_kind);
      const auto records = spin::sweep(cfg, [](const spin::BenchRecord& r) {
        std::cerr << r.algorithm << " b=" << r.b << " run " << r.run_id
                  << ": " << r.status << ' ' << r.wall_ms << " ms\n";
      });
      auto os = open_out(sw_out);
      spin::write_records(os, records);
    } else if (*mod) {
      const auto alg = spin::parse_algorithm(mod_alg);
      const auto p =
          spin::CostParams::make(mod_n, mod_b, effective_cores(mod_cores));
      spin::write_cost_breakdown(std::cout, alg, spin::cost_levelsum(alg, p));
    } else if (*cmp) {
      std::ifstream is(cmp_sweep);
      if (!is) throw spin::FormatError("cannot open '" + cmp_sweep + "'");
      const auto records = spin::read_records(is);
      const auto rep =
          spin::compare_model(records, cmp_n, effective_cores(cmp_cores),
                              spin::parse_algorithm(cmp_alg));
      auto os = open_out(cmp_out);
      spin::write_compare(os, rep);
      std::cout << "measured argmin b=" << rep.measured_argmin_b
                << ", predicted argmin b=" << rep.predicted_argmin_b
                << (rep.argmin_within_one_step ? " (within one step)"
                                               : " (more than one step)")
                << ", slope sign agreement " << rep.sign_agreement << '\n';
    } else if (*sc) {
      const spin::BlockMatrix a = spin::load_matrix(sc_in);
      const auto rows = spin::scalability(a, spin::parse_algorithm(sc_alg),
                                          sc_cores, sc_repeats);
      auto os = open_out(sc_out);
      spin::write_scale(os, rows);
    }
  } catch (const spin::SingularTile& e) {
    std::cerr << "spin: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const spin::FormatError& e) {
    std::cerr << "spin: " << e.what() << '\n';
    return kExitIo;
  } catch (const spin::InsufficientData& e) {
    std::cerr << "spin: " << e.what() << '\n';
    return kExitIo;
  } catch (const spin::Error& e) {
    std::cerr << "spin: " << e.what() << '\n';
    return kExitArgs;
  }
  return kExitOk;
}
