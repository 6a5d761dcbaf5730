// metadio: decide a system of equations in BS(1,k) or A wr Z.
//
// Exit status: 0 sat, 1 unsat, 2 unknown; with --verify-only 0 accepted,
// 3 rejected; 64 usage, 65 input syntax, 66 unreadable file.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "metadio/metadio.hpp"

namespace {

constexpr int kExitRejected = 3;
constexpr int kExitUsage = 64;
constexpr int kExitSyntax = 65;
constexpr int kExitNoInput = 66;

template <class T>
void env_default(const char* name, T& out) {
  if (const char* v = std::getenv(name)) {
    std::istringstream in(v);
    T parsed{};
    if (in >> parsed) out = parsed;
  }
}

bool read_text(const std::string& path, std::string& out) {
  if (path == "-") {
    std::ostringstream s;
    s << std::cin.rdbuf();
    out = s.str();
    return true;
  }
  std::ifstream f(path);
  if (!f) return false;
  std::ostringstream s;
  s << f.rdbuf();
  out = s.str();
  return true;
}

void debug_stage(const std::string& stage, const metadio::EquationSystem& sys) {
  using namespace metadio;
  if (stage == "reduce") {
    std::cout << render_reduced(reduce(sys));
    return;
  }
  Pipeline pl = build_pipeline(sys);
  if (pl.linear_empty) {
    std::cout << "linear stage infeasible at row " << pl.infeasible.row << ": " << pl.infeasible.divisor.get_str()
              << " does not divide " << pl.infeasible.value.get_str() << "\n";
    return;
  }
  for (std::size_t b = 0; b < pl.branches.size(); ++b) {
    const Branch& br = pl.branches[b];
    std::cout << "branch " << b << "\n";
    if (stage == "tri" || stage == "decide")
      for (const auto& t : br.tris) std::cout << render_tri(t);
    if (stage == "exp" || stage == "decide") {
      std::cout << "  " << br.stage << ": " << br.disjunction.size() << " linear system(s)\n";
      for (const auto& ls : br.disjunction) std::cout << "    " << render_linear_system(ls) << "\n";
    }
    if (stage == "decide") {
      for (std::size_t l = 0; l < br.leaves.size(); ++l) {
        std::cout << "  leaf " << l << (br.leaves[l].degenerate ? " (degenerate)" : "") << ", parameters:";
        for (const auto& p : br.leaves[l].params) std::cout << " " << p;
        std::cout << "\n";
      }
    }
  }
  if (pl.branches.empty()) std::cout << "no branches survive triangularization\n";
}

void print_human(const metadio::EquationSystem& sys, const metadio::Verdict& v) {
  using namespace metadio;
  std::cout << "verdict: " << verdict_name(v.kind) << "\n";
  if (v.kind == Verdict::Kind::Sat) {
    for (const auto& x : sys.variables) std::cout << "  " << x << " = " << render_element(v.witness.at(x)) << "\n";
  } else if (v.kind == Verdict::Kind::Unsat) {
    const Certificate& c = *v.certificate;
    if (c.kind == Certificate::Kind::LinearInfeasible) {
      std::cout << "  linear stage infeasible (row " << c.row.row << ")\n";
    } else {
      if (c.branches.empty()) std::cout << "  no branch survives triangularization\n";
      else std::cout << "  " << c.branches.size() << " branch(es) refuted\n";
      for (std::size_t b = 0; b < c.branches.size(); ++b) {
        const auto& bc = c.branches[b];
        auto moduli = [](const std::vector<ModulusLevel>& chain) {
          std::string s;
          for (const auto& lv : chain) {
            s += s.empty() ? "" : ", ";
            s += std::to_string(lv.modulus);
            if (!lv.poly.empty()) s += " / " + render_dense(lv.poly);
          }
          return s;
        };
        switch (bc.kind) {
          case BranchCert::Kind::EmptyDisjunction:
            std::cout << "  branch " << b << ": no exponent solutions (" << bc.stage << ")\n";
            break;
          case BranchCert::Kind::Modulus:
            std::cout << "  branch " << b << ": moduli " << moduli(bc.chain) << "\n";
            break;
          case BranchCert::Kind::Leaves:
            for (std::size_t l = 0; l < bc.leaves.size(); ++l) {
              std::cout << "  branch " << b << " leaf " << l << ": ";
              if (bc.leaves[l].kind == LeafCert::Kind::Degenerate) std::cout << "degenerate\n";
              else std::cout << "moduli " << moduli(bc.leaves[l].chain) << "\n";
            }
            break;
        }
      }
    }
  } else {
    std::cout << "  " << v.reason << "\n";
  }
  std::cout << "  steps " << v.stats.steps << ", branches " << v.stats.branches << ", leaves " << v.stats.leaves << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  using namespace metadio;
  Budget budget;
  env_default("METADIO_BUDGET_STEPS", budget.steps);
  env_default("METADIO_MAX_PRIME_POWER", budget.max_prime_power);
  env_default("METADIO_MAX_MONIC_DEGREE", budget.max_monic_degree);
  env_default("METADIO_RADIUS", budget.radius);
  env_default("METADIO_TIME_LIMIT", budget.time_limit);

  CLI::App app{"Decide systems of equations in BS(1,k) and wreath products A wr Z"};
  std::string input, format = "human", stage, verify_path;
  app.add_option("input", input, "Input file ('-' for stdin)");
  app.add_option("--budget-steps", budget.steps, "Total work steps")->check(CLI::PositiveNumber);
  app.add_option("--max-prime-power", budget.max_prime_power, "Largest modulus tried for BS(1,k)")->check(CLI::PositiveNumber);
  app.add_option("--max-monic-degree", budget.max_monic_degree, "Largest degree of h(t) for wreath products")
      ->check(CLI::PositiveNumber);
  app.add_option("--radius", budget.radius, "Radius of the plain witness search")->check(CLI::NonNegativeNumber);
  app.add_option("--time-limit", budget.time_limit, "Seconds")->check(CLI::PositiveNumber);
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"human", "json"}));
  app.add_option("--debug-stage", stage, "Print one pipeline stage and exit")
      ->check(CLI::IsMember({"reduce", "tri", "exp", "decide"}));
  app.add_option("--verify-only", verify_path, "Re-check a JSON report without searching");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (!verify_path.empty()) {
    if (!input.empty()) {
      std::cerr << "error: --verify-only takes no input file\n";
      return kExitUsage;
    }
    std::string text;
    if (!read_text(verify_path, text)) {
      std::cerr << "error: cannot read " << verify_path << "\n";
      return kExitNoInput;
    }
    Json j = Json::parse(text, nullptr, false);
    if (j.is_discarded()) {
      std::cerr << "error: " << verify_path << " is not JSON\n";
      return kExitSyntax;
    }
    ReportCheck r = check_report(j);
    std::cout << (r.ok ? "accepted" : "rejected") << ": " << r.message << "\n";
    return r.ok ? 0 : kExitRejected;
  }

  if (input.empty()) {
    std::cerr << "error: no input file\n" << app.help();
    return kExitUsage;
  }
  std::string text;
  if (!read_text(input, text)) {
    std::cerr << "error: cannot read " << input << "\n";
    return kExitNoInput;
  }
  EquationSystem sys;
  try {
    sys = parse_input(text);
  } catch (const ParseError& e) {
    std::cerr << (input == "-" ? "<stdin>" : input) << ":" << e.what() << "\n";
    return kExitSyntax;
  } catch (const std::exception& e) {
    std::cerr << (input == "-" ? "<stdin>" : input) << ": " << e.what() << "\n";
    return kExitSyntax;
  }

  if (!stage.empty()) {
    debug_stage(stage, sys);
    return 0;
  }

  const auto start = std::chrono::steady_clock::now();
  Verdict v = decide(sys, budget);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (format == "json") std::cout << report_json(sys, v, budget, seconds).dump(2) << "\n";
  else print_human(sys, v);
  switch (v.kind) {
    case Verdict::Kind::Sat: return 0;
    case Verdict::Kind::Unsat: return 1;
    default: return 2;
  }
}
