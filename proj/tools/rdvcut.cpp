// rdvcut: cut-off analysis for rendez-vous protocols.
//
// Subcommands: classify, check, table, cutoff, verify, evenodd,
// encode-net, decode-net, gen. Protocol files use the line-based format
// documented in the README; '-' reads from standard input.
//
// Exit codes: 0 = verdict produced, 1 = unknown (budget exhausted),
// 2 = input error.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "rdv/cutoff.hpp"
#include "rdv/evenodd.hpp"
#include "rdv/generator.hpp"
#include "rdv/model.hpp"
#include "rdv/petri.hpp"
#include "rdv/semantics.hpp"

namespace {

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(path);
  if (!in) throw rdv::ProtocolError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const char* entry_str(rdv::TableEntry e) {
  switch (e) {
    case rdv::TableEntry::Yes: return "yes";
    case rdv::TableEntry::No: return "no";
    case rdv::TableEntry::Unknown: return "unknown";
  }
  return "unknown";
}

struct BudgetFlags {
  uint64_t n_max = 12;
  uint64_t node_cap = 1'000'000;
  uint64_t wall_time_s = 60;
  uint64_t window = 5;
  bool include_zero = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--n-max", n_max, "largest population size searched")
        ->envname("RDVCUT_N_MAX");
    cmd->add_option("--node-cap", node_cap, "stored configurations per search")
        ->envname("RDVCUT_NODE_CAP");
    cmd->add_option("--wall-time", wall_time_s, "wall-clock budget in seconds")
        ->envname("RDVCUT_WALL_TIME");
    cmd->add_option("--window", window, "consecutive confirmations above a bound");
    cmd->add_flag("--include-zero", include_zero, "count n = 0 as a population size");
  }
  rdv::Budget budget() const {
    rdv::Budget b;
    b.n_max = n_max;
    b.node_cap = node_cap;
    b.wall_time = std::chrono::seconds(wall_time_s);
    b.window = window;
    b.include_zero = include_zero;
    return b;
  }
};

void print_certificate(const rdv::Protocol& p, const rdv::Certificate& cert, bool json) {
  if (json) {
    std::cout << rdv::certificate_to_json(p, cert).dump(2) << '\n';
    return;
  }
  const char* qual = cert.exact ? "exact" : "budget-qualified";
  switch (cert.verdict) {
    case rdv::Verdict::Cutoff:
      std::cout << "Cutoff B=" << cert.bound;
      if (cert.minimal_within_window && *cert.minimal_within_window != cert.bound)
        std::cout << " (minimal within window: " << *cert.minimal_within_window << ")";
      else
        std::cout << " (minimal within window)";
      break;
    case rdv::Verdict::NoCutoff:
      std::cout << "No cutoff";
      break;
    case rdv::Verdict::Unknown:
      std::cout << "Unknown";
      break;
  }
  std::cout << ", justification: " << rdv::justification_name(cert.just) << " [" << qual << "]\n";
  if (const auto* w = std::get_if<rdv::ExhaustiveWindowJust>(&cert.just)) {
    std::cout << "table:";
    for (uint64_t n = 1; n < w->table.size(); ++n)
      std::cout << ' ' << n << ':' << entry_str(w->table[n]);
    std::cout << '\n';
  } else if (const auto* c = std::get_if<rdv::CompositionJust>(&cert.just)) {
    std::cout << "consecutive witnesses at " << c->n_consecutive << " and "
              << c->n_consecutive + 1 << "; guaranteed bound " << c->guaranteed_bound << '\n';
  } else if (const auto* pp = std::get_if<rdv::ParityPumpingJust>(&cert.just)) {
    std::cout << "parity witnesses: even n=" << pp->n_even << ", odd n=" << pp->n_odd << '\n';
  } else if (const auto* a = std::get_if<rdv::AbstractObstructionJust>(&cert.just)) {
    std::cout << "failed parity class: " << (a->failed == rdv::Parity::Even ? "even" : "odd")
              << '\n';
  } else if (const auto* f = std::get_if<rdv::UnreachableFamilyJust>(&cert.just)) {
    std::cout << "unreachable family: n = " << f->base_n << " + k*" << f->period
              << " (checked to " << f->checked_to << ")\n";
  }
  for (const std::string& note : cert.notes) std::cout << "note: " << note << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cut-off analysis for rendez-vous protocols"};
  app.require_subcommand(1);

  std::string file, cert_file, out_cert;
  bool json = false;
  uint64_t n = 0;
  BudgetFlags bf;

  auto* classify_cmd = app.add_subcommand("classify", "report protocol class flags");
  classify_cmd->add_option("file", file)->required();
  classify_cmd->add_flag("--json", json);

  auto* check_cmd = app.add_subcommand("check", "exact reachability for one population size");
  check_cmd->add_option("file", file)->required();
  check_cmd->add_option("--n", n, "population size")->required();
  check_cmd->add_flag("--json", json);
  bf.attach(check_cmd);

  auto* table_cmd = app.add_subcommand("table", "witness table for n = 0..n-max");
  table_cmd->add_option("file", file)->required();
  table_cmd->add_flag("--json", json);
  bf.attach(table_cmd);

  auto* cutoff_cmd = app.add_subcommand("cutoff", "decide the cut-off problem");
  cutoff_cmd->add_option("file", file)->required();
  cutoff_cmd->add_option("--cert", out_cert, "write the certificate to this file");
  cutoff_cmd->add_flag("--json", json);
  bf.attach(cutoff_cmd);

  auto* verify_cmd = app.add_subcommand("verify", "replay a certificate against a protocol");
  verify_cmd->add_option("file", file)->required();
  verify_cmd->add_option("cert", cert_file)->required();
  verify_cmd->add_flag("--json", json);
  bf.attach(verify_cmd);

  auto* evenodd_cmd = app.add_subcommand("evenodd", "abstract parity analysis (symmetric only)");
  evenodd_cmd->add_option("file", file)->required();
  evenodd_cmd->add_flag("--json", json);

  auto* encode_cmd = app.add_subcommand("encode-net", "print the Petri net of a protocol");
  encode_cmd->add_option("file", file)->required();

  std::string pi_name, pf_name;
  auto* decode_cmd = app.add_subcommand("decode-net", "print the protocol simulating a net");
  decode_cmd->add_option("file", file)->required();
  decode_cmd->add_option("--pi", pi_name, "initial single-token place")->required();
  decode_cmd->add_option("--pf", pf_name, "final single-token place")->required();

  auto* gen_cmd = app.add_subcommand("gen", "generate a protocol");
  uint32_t exp_k = 1;
  rdv::RandomSpec rspec;
  auto* gen_exp = gen_cmd->add_subcommand("exp", "exponential-cutoff family");
  gen_exp->add_option("-k,--k", exp_k, "chain length")->required();
  auto* gen_rand = gen_cmd->add_subcommand("random", "seeded random protocol");
  gen_rand->add_option("--states", rspec.num_process_states);
  gen_rand->add_option("--letters", rspec.num_letters);
  gen_rand->add_option("--density", rspec.edge_density);
  gen_rand->add_flag("--symmetric", rspec.symmetric);
  bool with_leader = false;
  gen_rand->add_flag("--leader", with_leader, "generate a leader component");
  gen_rand->add_option("--leader-states", rspec.num_leader_states);
  gen_rand->add_option("--seed", rspec.seed);
  gen_cmd->require_subcommand(1);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*classify_cmd) {
      rdv::Protocol p = rdv::parse_protocol(read_input(file));
      rdv::Classification c = rdv::classify(p);
      auto warnings = rdv::validate_warnings(p);
      if (json) {
        nlohmann::json j{{"symmetric", c.symmetric},
                         {"leaderless", c.leaderless},
                         {"connectivity_ok", c.connectivity_ok},
                         {"warnings", warnings}};
        std::cout << j.dump(2) << '\n';
      } else {
        std::cout << "symmetric: " << (c.symmetric ? "yes" : "no") << '\n'
                  << "leaderless: " << (c.leaderless ? "yes" : "no") << '\n'
                  << "connectivity_ok: " << (c.connectivity_ok ? "yes" : "no") << '\n';
        for (const auto& w : warnings) std::cout << "warning: " << w << '\n';
      }
      return 0;
    }

    if (*check_cmd) {
      rdv::Protocol p = rdv::parse_protocol(read_input(file));
      rdv::SearchBudget sb;
      sb.node_cap = bf.node_cap;
      sb.deadline = std::chrono::steady_clock::now() + std::chrono::seconds(bf.wall_time_s);
      rdv::ReachResult r = rdv::reachable_final(p, n, sb);
      if (json) {
        nlohmann::json j{{"n", n}};
        switch (r.kind) {
          case rdv::ReachKind::Witness:
            j["verdict"] = "reachable";
            j["exact"] = true;
            j["witness"] = rdv::trace_to_json(p, *r.witness);
            break;
          case rdv::ReachKind::NotReachable:
            j["verdict"] = "not_reachable";
            j["exact"] = true;
            break;
          case rdv::ReachKind::BudgetExceeded:
            j["verdict"] = "unknown";
            j["exact"] = false;
            break;
        }
        std::cout << j.dump(2) << '\n';
      } else {
        switch (r.kind) {
          case rdv::ReachKind::Witness:
            std::cout << "reachable (exact), witness with " << r.witness->steps.size()
                      << " steps\n";
            break;
          case rdv::ReachKind::NotReachable:
            std::cout << "NOT reachable (exact)\n";
            break;
          case rdv::ReachKind::BudgetExceeded:
            std::cout << "unknown (budget exceeded)\n";
            break;
        }
      }
      return r.kind == rdv::ReachKind::BudgetExceeded ? 1 : 0;
    }

    if (*table_cmd) {
      rdv::Protocol p = rdv::parse_protocol(read_input(file));
      rdv::SearchBudget sb;
      sb.node_cap = bf.node_cap;
      sb.deadline = std::chrono::steady_clock::now() + std::chrono::seconds(bf.wall_time_s);
      auto table = rdv::witness_table(p, bf.n_max, sb);
      if (json) {
        nlohmann::json j = nlohmann::json::object();
        for (uint64_t i = 0; i < table.size(); ++i)
          j[std::to_string(i)] = entry_str(table[i]);
        std::cout << j.dump(2) << '\n';
      } else {
        for (uint64_t i = 0; i < table.size(); ++i)
          std::cout << i << ": " << entry_str(table[i])
                    << (table[i] == rdv::TableEntry::Unknown ? "" : " (exact)") << '\n';
      }
      return 0;
    }

    if (*cutoff_cmd) {
      rdv::Protocol p = rdv::parse_protocol(read_input(file));
      rdv::Certificate cert = rdv::decide(p, bf.budget());
      if (!out_cert.empty()) {
        std::ofstream out(out_cert);
        if (!out) throw rdv::ProtocolError("cannot write '" + out_cert + "'");
        out << rdv::certificate_to_json(p, cert).dump(2) << '\n';
      }
      print_certificate(p, cert, json);
      return cert.verdict == rdv::Verdict::Unknown ? 1 : 0;
    }

    if (*verify_cmd) {
      rdv::Protocol p = rdv::parse_protocol(read_input(file));
      nlohmann::json j = nlohmann::json::parse(read_input(cert_file));
      rdv::Certificate cert = rdv::certificate_from_json(p, j);
      rdv::VerifyResult r = rdv::verify_certificate(p, cert, bf.budget());
      if (json) {
        std::cout << nlohmann::json{{"valid", r.valid}, {"reason", r.reason}}.dump(2) << '\n';
      } else {
        std::cout << (r.valid ? "VALID" : "INVALID: " + r.reason) << '\n';
      }
      return r.valid ? 0 : 2;
    }

    if (*evenodd_cmd) {
      rdv::Protocol p = rdv::parse_protocol(read_input(file));
      rdv::SymmetricDecision d = rdv::decide_symmetric_cop(p);
      bool leaderless = p.leaderless();
      if (json) {
        nlohmann::json j{{"has_cutoff", d.has_cutoff},
                         {"even_reachable", d.even_path.has_value()},
                         {"odd_reachable", d.odd_path.has_value()}};
        rdv::Endpoints ep = rdv::abstract_endpoints(p);
        if (d.odd_path) {
          j["odd_path_length"] = d.odd_path->steps.size();
          j["odd_path"] = rdv::abstract_path_to_json(p, ep.init_odd, *d.odd_path);
        }
        if (!leaderless && d.even_path)
          j["even_path"] = rdv::abstract_path_to_json(p, ep.init_even, *d.even_path);
        std::cout << j.dump(2) << '\n';
      } else {
        std::cout << "even class: " << (d.even_path ? "reachable" : "unreachable")
                  << (leaderless ? " (trivial: endpoints coincide)" : "") << '\n';
        std::cout << "odd class: " << (d.odd_path ? "reachable" : "unreachable") << '\n';
        std::cout << (d.has_cutoff ? "HasCutoff" : "NoCutoff") << '\n';
        if (leaderless && d.odd_path) {
          size_t e = rdv::symmetric_edges(p).size();
          std::cout << "odd witness length " << d.odd_path->steps.size() << " (bound " << e * e
                    << ")\n";
        }
      }
      return 0;
    }

    if (*encode_cmd) {
      rdv::Protocol p = rdv::parse_protocol(read_input(file));
      rdv::ProtocolNet pn = rdv::protocol_to_net(p);
      std::cout << rdv::print_net(pn.net, {{"m0", pn.m0}});
      std::cout << "# final place: " << pn.net.places[pn.final_place] << '\n';
      return 0;
    }

    if (*decode_cmd) {
      rdv::NetFile nf = rdv::parse_net_file(read_input(file));
      auto pi = nf.net.place_index(pi_name);
      auto pf = nf.net.place_index(pf_name);
      if (!pi || !pf) throw rdv::ProtocolError("unknown place name");
      std::cout << rdv::print_protocol(rdv::net_to_protocol(nf.net, *pi, *pf));
      return 0;
    }

    if (*gen_cmd) {
      if (*gen_exp) {
        std::cout << rdv::print_protocol(rdv::gen_exp_family(exp_k));
      } else {
        rspec.leaderless = !with_leader;
        std::cout << rdv::print_protocol(rdv::gen_random(rspec));
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
