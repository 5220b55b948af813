// bnf: command-line front end for the back-and-forth game library.
//
// Exit codes: 0 success / holds, 1 fails, 2 error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "bnf/builders.hpp"
#include "bnf/classify.hpp"
#include "bnf/constructions.hpp"
#include "bnf/game.hpp"
#include "bnf/http.hpp"
#include "bnf/json.hpp"
#include "bnf/session.hpp"
#include "bnf/synth.hpp"
#include "bnf/testing/suites.hpp"

using namespace bnf;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

/// A structure file, or `chain:N` for the strict order on N elements.
Structure load_structure(const std::string& arg) {
  if (arg.rfind("chain:", 0) == 0) {
    try {
      return build_linear_order(std::stoul(arg.substr(6)));
    } catch (const std::logic_error&) {
      throw InvalidArgument("bad chain size in '" + arg + "'");
    }
  }
  return parse_structure(slurp(arg));
}

/// A formula file, or the formula text itself.
Formula load_formula(const std::string& arg) {
  if (!arg.empty() && arg.front() == '(') return parse_formula(arg);
  return parse_formula(slurp(arg));
}

ElementTuple parse_tuple(const std::string& text) {
  ElementTuple out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t()");
    const auto e = item.find_last_not_of(" \t()");
    if (b == std::string::npos) continue;
    try {
      std::size_t used = 0;
      const unsigned long v = std::stoul(item.substr(b, e - b + 1), &used);
      if (used != e - b + 1) throw std::invalid_argument(item);
      out.push_back(static_cast<Element>(v));
    } catch (const std::logic_error&) {
      throw InvalidArgument("bad tuple element '" + item + "'");
    }
  }
  return out;
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> out;
  for (Element e : parse_tuple(text)) out.push_back(e);
  return out;
}

/// `file*3,chain:2*1`: components with multiplicities (default 1).
ComponentSpec parse_components(const std::string& text) {
  ComponentSpec spec;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    std::size_t mult = 1;
    const auto star = item.rfind('*');
    if (star != std::string::npos) {
      try {
        mult = std::stoul(item.substr(star + 1));
      } catch (const std::logic_error&) {
        throw InvalidArgument("bad multiplicity in '" + item + "'");
      }
      item = item.substr(0, star);
    }
    spec.parts.push_back({load_structure(item), mult});
  }
  if (spec.parts.empty()) throw InvalidArgument("no components given");
  return spec;
}

BoolTable parse_table(const std::string& bounds, const std::string& bits) {
  BoolTable t(parse_sizes(bounds));
  std::string clean;
  for (char c : bits)
    if (c == '0' || c == '1') clean += c;
    else if (!std::isspace(static_cast<unsigned char>(c))) throw InvalidArgument("table bits must be 0 or 1");
  if (clean.size() != t.bits.size())
    throw InvalidArgument("table needs " + std::to_string(t.bits.size()) + " bits, got " + std::to_string(clean.size()));
  for (std::size_t i = 0; i < clean.size(); ++i) t.bits[i] = clean[i] == '1';
  return t;
}

std::string yes(bool b) { return b ? "holds" : "fails"; }

struct Output {
  bool json = false;
  int code = 0;
  Json doc = Json::object();
  std::ostringstream text;

  void flush() {
    if (json)
      std::cout << doc.dump(2) << "\n";
    else
      std::cout << text.str();
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Back-and-forth games on finite relational structures"};
  app.require_subcommand(1);
  app.fallthrough();
  Output out;
  app.add_flag("--json", out.json, "Machine-readable output");

  std::string left, right, left_tuple, right_tuple, structure, tuple, formula, direction = "leq";
  int n = 1, cap = 4;

  // bf
  auto* bf = app.add_subcommand("bf", "Decide ≤_n, ≥_n or ≡_n between two structures");
  bf->add_option("--left", left, "Left structure")->required();
  bf->add_option("--right", right, "Right structure")->required();
  bf->add_option("--n", n, "Clock")->required();
  bf->add_option("--direction", direction, "leq, geq or equiv")->check(CLI::IsMember({"leq", "geq", "equiv"}));
  bf->add_option("--left-tuple", left_tuple, "Comma-separated left tuple");
  bf->add_option("--right-tuple", right_tuple, "Comma-separated right tuple");
  bf->callback([&] {
    Json body = {{"left", structure_to_json(load_structure(left))},
                 {"right", structure_to_json(load_structure(right))},
                 {"n", n},
                 {"direction", direction},
                 {"left_tuple", parse_tuple(left_tuple)},
                 {"right_tuple", parse_tuple(right_tuple)}};
    SessionConfig unlimited{std::numeric_limits<int>::max(), std::numeric_limits<std::size_t>::max()};
    out.doc = compute_bf(body, unlimited);
    const bool holds = out.doc["holds"];
    out.code = holds ? 0 : 1;
    out.text << yes(holds) << "\n";
    if (!out.doc["witness"].is_null())
      out.text << "witness in " << out.doc["witness_structure"].get<std::string>() << ": "
               << tuple_to_string(out.doc["witness"].get<ElementTuple>()) << "\n";
  });

  // rank
  auto* rank = app.add_subcommand("rank", "Largest n ≤ cap with left ≡_n right");
  rank->add_option("--left", left)->required();
  rank->add_option("--right", right)->required();
  rank->add_option("--cap", cap, "Largest clock tried");
  rank->callback([&] {
    const int r = bf_rank(load_structure(left), load_structure(right), cap);
    out.doc = {{"rank", r}, {"cap", cap}, {"capped", r >= cap}};
    out.text << r << (r >= cap ? " (cap reached)" : "") << "\n";
  });

  // distinguish
  auto* dist = app.add_subcommand("distinguish", "Formula separating a failing ≤_n position");
  dist->add_option("--left", left)->required();
  dist->add_option("--right", right)->required();
  dist->add_option("--n", n)->required();
  dist->add_option("--left-tuple", left_tuple);
  dist->add_option("--right-tuple", right_tuple);
  dist->callback([&] {
    Structure l = load_structure(left), r = load_structure(right);
    Position pos(l, parse_tuple(left_tuple), r, parse_tuple(right_tuple), n);
    if (bf_leq(pos).holds) {
      out.doc = {{"holds", true}, {"formula", nullptr}};
      out.text << "holds; no distinguishing formula\n";
      out.code = 1;
      return;
    }
    Formula f = distinguishing_formula(pos);
    out.doc = {{"holds", false}, {"formula", to_string(f)}, {"report", report_to_json(classify(f))}};
    out.text << to_string(f) << "\n";
  });

  // classify
  auto* cls = app.add_subcommand("classify", "Complexity ranks of a formula");
  cls->add_option("--formula", formula, "Formula file or text")->required();
  cls->callback([&] {
    const ComplexityReport r = classify(load_formula(formula));
    out.doc = report_to_json(r);
    for (auto& [k, v] : out.doc.items()) out.text << k << " " << v.get<int>() << "\n";
  });

  // eval
  auto* ev = app.add_subcommand("eval", "Evaluate a formula at a tuple (free variables x0, x1, ...)");
  ev->add_option("--structure", structure)->required();
  ev->add_option("--formula", formula)->required();
  ev->add_option("--tuple", tuple);
  ev->callback([&] {
    Structure m = load_structure(structure);
    ElementTuple t = parse_tuple(tuple);
    const bool v = eval_tuple(load_formula(formula), m, var_names(0, t.size()), t);
    out.doc = {{"value", v}};
    out.code = v ? 0 : 1;
    out.text << (v ? "true" : "false") << "\n";
  });

  // synth
  auto* synth = app.add_subcommand("synth", "Formula synthesis");
  synth->require_subcommand(1);
  int alpha = 1, beta = 1;
  auto* tf = synth->add_subcommand("type-formula", "Canonical ≥_n / ≤_n type formulas");
  tf->add_option("--structure", structure)->required();
  tf->add_option("--tuple", tuple);
  tf->add_option("--n", n)->required();
  tf->callback([&] {
    CanonicalFormulas cf = canonical_type_formulas(load_structure(structure), parse_tuple(tuple), n);
    out.doc = {{"phi", to_string(cf.phi)}, {"psi", to_string(cf.psi)}, {"max_tuple_length", cf.max_tuple_length}};
    out.text << "phi " << to_string(cf.phi) << "\npsi " << to_string(cf.psi) << "\n";
  });
  auto* g1 = synth->add_subcommand("geq1", "Sentence true in N iff N ≥_1 M");
  g1->add_option("--structure", structure)->required();
  g1->callback([&] {
    Formula f = synth_geq1_sentence(load_structure(structure));
    out.doc = {{"formula", to_string(f)}};
    out.text << to_string(f) << "\n";
  });
  auto* l1 = synth->add_subcommand("leq1", "Sentence true in N iff N ≤_1 M");
  l1->add_option("--structure", structure)->required();
  l1->callback([&] {
    Formula f = synth_leq1_sentence(load_structure(structure));
    out.doc = {{"formula", to_string(f)}};
    out.text << to_string(f) << "\n";
  });
  auto* is = synth->add_subcommand("internal-sigma", "Σ_alpha equivalent of an E_alpha formula inside M");
  is->add_option("--structure", structure)->required();
  is->add_option("--formula", formula)->required();
  is->add_option("--alpha", alpha)->required();
  is->callback([&] {
    Formula f = internal_sigma(load_structure(structure), load_formula(formula), alpha);
    out.doc = {{"formula", to_string(f)}, {"report", report_to_json(classify(f))}};
    out.text << to_string(f) << "\n";
  });
  auto* it = synth->add_subcommand("isolate-type", "Π_beta formula isolating the ≥_beta type of a tuple");
  it->add_option("--structure", structure)->required();
  it->add_option("--tuple", tuple);
  it->add_option("--beta", beta)->required();
  it->callback([&] {
    Formula f = isolate_pi_type(load_structure(structure), parse_tuple(tuple), beta);
    out.doc = {{"formula", to_string(f)}};
    out.text << to_string(f) << "\n";
  });

  // flower
  std::string fam_s, fam_t, copies_list = "1,2,3";
  std::size_t copies = 2;
  bool geq3 = false;
  auto* fl = app.add_subcommand("flower", "Flower graphs of set families");
  fl->add_option("--family", fam_s, "Family such as {0};{0,1}")->required();
  fl->add_option("--against", fam_t, "Second family: compare the flower graphs");
  fl->add_option("--copies", copies, "Replicas per petal when printing or for --geq3");
  fl->add_option("--schedule", copies_list, "Replica counts for the ≤_2 comparison");
  fl->add_flag("--geq3", geq3, "Check ≥_3 instead of ≤_2");
  fl->callback([&] {
    Family s = Family::parse(fam_s);
    if (fam_t.empty()) {
      Structure g = build_flower_graph(s, copies);
      out.doc = structure_to_json(g);
      out.text << serialize_structure(g);
      return;
    }
    Family t = Family::parse(fam_t);
    const std::size_t bound = std::max(s.universe_bound(), t.universe_bound());
    s = close_family(Family(s.sets(), bound));
    t = close_family(Family(t.sets(), bound));
    if (geq3) {
      Geq3Report r = verify_claim_geq3(s, t, copies);
      out.doc = {{"hypothesis_ok", r.hypothesis_ok},
                 {"hypothesis_error", r.hypothesis_error},
                 {"copies", r.copies},
                 {"verdict", r.verdict ? Json(*r.verdict) : Json(nullptr)}};
      if (!r.hypothesis_ok) {
        out.text << "hypothesis fails: " << r.hypothesis_error << "\n";
        out.code = 1;
      } else {
        out.text << "≥_3 " << yes(*r.verdict) << "\n";
        out.code = *r.verdict ? 0 : 1;
      }
      return;
    }
    SubsetLeq2Report r = verify_claim_subsetleq2(s, t, parse_sizes(copies_list));
    out.doc = {{"dominates", r.dominates},
               {"copies", r.copies},
               {"verdicts", r.verdicts},
               {"sizes_left", r.sizes_s},
               {"sizes_right", r.sizes_t},
               {"stabilized_at", r.stabilized_at ? Json(*r.stabilized_at) : Json(nullptr)},
               {"stabilized_verdict", r.stabilized_verdict ? Json(*r.stabilized_verdict) : Json(nullptr)},
               {"agrees", r.agrees}};
    out.text << "dominates " << (r.dominates ? "yes" : "no") << "\n";
    for (std::size_t i = 0; i < r.copies.size(); ++i)
      out.text << "copies " << r.copies[i] << ": ≤_2 " << yes(r.verdicts[i]) << "\n";
    out.text << (r.agrees ? "agrees" : "disagrees") << "\n";
    out.code = r.agrees ? 0 : 1;
  });

  // family
  auto* fam = app.add_subcommand("family", "Set-family operations");
  fam->require_subcommand(1);
  std::size_t bound = 0;
  auto* fc = fam->add_subcommand("close", "Close a family under additions");
  fc->add_option("--family", fam_s)->required();
  fc->add_option("--bound", bound, "Universe bound (default: one past the largest element)");
  fc->callback([&] {
    Family c = close_family(Family::parse(fam_s, bound));
    out.doc = {{"family", c.to_string()}, {"bound", c.universe_bound()}};
    out.text << c.to_string() << "\n";
  });
  auto* fd = fam->add_subcommand("dominates", "Does every member of t contain one of s?");
  fd->add_option("--s", fam_s)->required();
  fd->add_option("--t", fam_t)->required();
  fd->callback([&] {
    Family s = Family::parse(fam_s), t = Family::parse(fam_t);
    const std::size_t b = std::max(s.universe_bound(), t.universe_bound());
    const bool d = dominates(Family(s.sets(), b), Family(t.sets(), b));
    out.doc = {{"dominates", d}};
    out.code = d ? 0 : 1;
    out.text << (d ? "dominates" : "does not dominate") << "\n";
  });

  // gadget
  auto* gad = app.add_subcommand("gadget", "Gadget and decomposition checks");
  gad->require_subcommand(1);
  std::string bounds, bits, a_spec, b_spec;
  std::size_t row = 0, truncation = 2;
  auto* lm = gad->add_subcommand("lemma21", "Build the table gadget for one row and check it");
  lm->add_option("--bounds", bounds, "Table bounds: i,m,j or i,m,j,m',j'")->required();
  lm->add_option("--bits", bits, "Table bits in row-major order")->required();
  lm->add_option("--row", row, "Row index i");
  lm->add_option("--truncation", truncation, "Replicas standing in for infinitely many");
  lm->callback([&] {
    BoolTable table = parse_table(bounds, bits);
    const int level = table.bounds.size() == 5 ? 3 : 2;
    GadgetPair g = build_lemma21_pair(level, table, row, truncation);
    const bool holds = lemma21_row_holds(table, row);
    const bool verdict = GameSolver(g.a, g.b).geq({}, {}, level);
    out.doc = {{"n", level}, {"row_holds", holds}, {"geq", verdict},
               {"sizes", {g.a.size(), g.b.size()}}};
    out.text << "row " << row << " " << yes(holds) << "; A ≥_" << level << " B " << yes(verdict) << "\n";
    out.code = verdict ? 0 : 1;
  });
  auto* uc = gad->add_subcommand("union-criteria", "Component criteria for (A, a) ≥_n (B, b) on disjoint unions");
  uc->add_option("--a", a_spec, "Components of A: file*mult,...")->required();
  uc->add_option("--b", b_spec, "Components of B")->required();
  uc->add_option("--a-tuple", left_tuple);
  uc->add_option("--b-tuple", right_tuple);
  uc->add_option("--n", n)->required();
  uc->callback([&] {
    UnionCriteriaReport r =
        check_union_criteria(parse_components(a_spec), parse_tuple(left_tuple), parse_components(b_spec),
                             parse_tuple(right_tuple), n);
    out.doc = {{"n", r.n},
               {"a", r.cond_a},
               {"b", r.cond_b},
               {"c", r.cond_c},
               {"d", r.cond_d},
               {"conclusion", r.conclusion ? Json(*r.conclusion) : Json(nullptr)},
               {"multiplicities_a", r.multiplicities_a},
               {"multiplicities_b", r.multiplicities_b}};
    out.text << "a " << yes(r.cond_a) << "\nb " << yes(r.cond_b) << "\nc " << yes(r.cond_c) << "\nd "
             << yes(r.cond_d) << "\n";
    if (r.conclusion) out.text << "(A, a) ≥_" << n << " (B, b) " << yes(*r.conclusion) << "\n";
    out.code = r.cond_a && r.cond_b && r.cond_c && r.cond_d && r.conclusion.value_or(false) ? 0 : 1;
  });
  auto* ur = gad->add_subcommand("union-refute", "Find a B component that refutes B ≥_n A");
  ur->add_option("--a", a_spec)->required();
  ur->add_option("--b", b_spec)->required();
  ur->add_option("--n", n)->required();
  ur->callback([&] {
    UnionRefutationReport r = check_union_refutation(parse_components(a_spec), parse_components(b_spec), n);
    out.doc = {{"n", r.n},
               {"asserted", r.asserted},
               {"verified", r.verified},
               {"witness_part", r.witness_part ? Json(*r.witness_part) : Json(nullptr)}};
    if (r.asserted)
      out.text << "part " << *r.witness_part << " refutes; " << (r.verified ? "verified" : "not verified") << "\n";
    else
      out.text << "no refuting part\n";
    out.code = r.asserted && r.verified ? 0 : 1;
  });
  auto* ifc = gad->add_subcommand("interval-factor", "Compare a linear-order position with its interval factors");
  ifc->add_option("--left", left)->required();
  ifc->add_option("--right", right)->required();
  ifc->add_option("--left-tuple", left_tuple);
  ifc->add_option("--right-tuple", right_tuple);
  ifc->add_option("--n", n)->required();
  ifc->callback([&] {
    IntervalFactoringReport r = interval_factoring_check(load_structure(left), parse_tuple(left_tuple),
                                                         load_structure(right), parse_tuple(right_tuple), n);
    Json segs = Json::array();
    for (const auto& s : r.segments)
      segs.push_back({{"left", s.a_elements}, {"right", s.b_elements}, {"geq", s.verdict}});
    out.doc = {{"direct", r.direct}, {"factored", r.factored}, {"agree", r.agree}, {"segments", segs}};
    out.text << "direct " << yes(r.direct) << "\nfactored " << yes(r.factored) << "\n"
             << (r.agree ? "agree" : "disagree") << "\n";
    out.code = r.agree ? 0 : 1;
  });

  // verify
  std::string suite = "all";
  std::uint64_t seed = 1;
  auto* ver = app.add_subcommand("verify", "Run the acceptance suites");
  ver->add_option("--suite", suite, "Suite id or name, or all");
  ver->add_option("--seed", seed, "Random seed");
  ver->callback([&] {
    std::vector<bnf::testing::SuiteResult> results;
    std::ostringstream lines;
    const int failed = bnf::testing::run_suites(suite, seed, lines, &results);
    Json arr = Json::array();
    for (const auto& r : results)
      arr.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"checked", r.checked},
                     {"failures", r.failures}, {"detail", r.detail}, {"seconds", r.seconds}});
    out.doc = {{"seed", seed}, {"failed", failed}, {"suites", arr}};
    out.text << lines.str() << (failed ? std::to_string(failed) + " suite(s) failed" : "all suites passed") << "\n";
    out.code = failed ? 1 : 0;
  });

  // serve
  std::string host = "127.0.0.1", log_path;
  int port = 8080;
  SessionConfig config;
  auto* srv = app.add_subcommand("serve", "Run the HTTP+JSON service");
  srv->add_option("--host", host);
  srv->add_option("--port", port)->envname("BNF_PORT");
  srv->add_option("--clock-cap", config.clock_cap)->envname("BNF_CLOCK_CAP");
  srv->add_option("--size-cap", config.size_cap)->envname("BNF_SIZE_CAP");
  srv->add_option("--log", log_path, "Append-only session log, replayed on start");
  srv->callback([&] {
    SessionStore store(config, log_path.empty() ? std::nullopt : std::optional<std::string>(log_path));
    httplib::Server server;
    install_routes(server, store);
    std::cerr << "listening on " << host << ":" << port << "\n";
    if (!server.listen(host, port)) throw Error("io_error", "cannot listen on " + host + ":" + std::to_string(port));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const Error& e) {
    if (out.json)
      std::cout << error_to_json(e).dump(2) << "\n";
    else
      std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  out.flush();
  return out.code;
}
