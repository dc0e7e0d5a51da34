#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "orbiteq/orbiteq.hpp"

#ifndef ORBITEQ_DATA_DIR
#define ORBITEQ_DATA_DIR "data"
#endif

namespace {

using namespace orbiteq;
namespace fs = std::filesystem;

enum Exit { Ok = 0, ExpectationFailed = 1, InvalidInput = 2, Contradiction = 3 };

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  std::string format = "text";
  int search_bound = 8;
  int max_depth = 8;
  int k_bound = 16;
  int inner_dim = 4;

  ClassifyOptions classify_options() const {
    ClassifyOptions o;
    o.search_bound = search_bound;
    o.max_depth = max_depth;
    o.k_bound = k_bound;
    o.inner_dim = inner_dim;
    return o;
  }
  bool json() const { return format == "json"; }
};

std::string read_file(std::string const &path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string stem(std::string const &path) { return fs::path(path).stem().string(); }

TransitionMatrix matrix_file(std::string const &path) {
  if (!fs::exists(path)) throw InputError("cannot open " + path);
  return load_matrix(path);
}

void emit_json(Json const &j) { std::cout << j.dump(2) << "\n"; }

int cmd_invariants(Config const &cfg, std::vector<std::string> const &files) {
  Json all = Json::array();
  std::string text;
  for (auto const &f : files) {
    Json j = invariants_json(stem(f), matrix_file(f));
    if (!text.empty()) text += "\n";
    text += flat_text(j);
    all.push_back(std::move(j));
  }
  if (cfg.json()) emit_json(all);
  else std::cout << text;
  return Ok;
}

int cmd_classify(Config const &cfg, std::string const &fa, std::string const &fb, std::vector<std::vector<std::string>> const &certs) {
  TransitionMatrix a = matrix_file(fa), b = matrix_file(fb);
  std::vector<NamedCertificate> named;
  for (auto const &pair : certs) {
    if (pair.size() != 2) throw InputError("--cert takes a forward and a backward transducer file");
    named.push_back({stem(pair[0]), HomeoCertificate(load_transducer(pair[0]), load_transducer(pair[1]))});
  }
  RelationReport rep = classify(a, b, named, cfg.classify_options(), stem(fa), stem(fb));
  if (cfg.json()) emit_json(report_json(rep));
  else std::cout << report_text(rep);
  return Ok;
}

Json tableau_json(TableauElement const &tau) {
  Json j;
  int n = tau.matrix().size();
  j["n"] = n;
  Json pairs = Json::array();
  for (auto const &p : tau.pairs()) pairs.push_back({format_word(p.source, n), format_word(p.target, n)});
  j["pairs"] = pairs;
  return j;
}

Json function_json(LCFunction const &f) {
  Json j;
  int n = f.matrix().size();
  j["depth"] = f.depth();
  Json table = Json::object();
  if (f.depth() == 0) table["-"] = *f.constant_value();
  for (auto const &[w, v] : f.table()) table[format_word(w, n)] = v;
  j["table"] = table;
  return j;
}

int cmd_fullgroup(Config const &cfg, std::string const &op, std::string const &matrix, std::vector<std::string> const &files) {
  TransitionMatrix a = matrix_file(matrix);
  std::vector<TableauElement> taus;
  for (auto const &f : files) taus.push_back(parse_tableau(a, read_file(f)));
  std::size_t const want = op == "compose" ? 2 : 1;
  if (taus.size() != want) throw InputError(op + " takes " + std::to_string(want) + " tableau file(s)");
  Json j;
  j["op"] = op;
  std::string text;
  if (op == "compose" || op == "invert") {
    TableauElement r = (op == "compose" ? compose(taus[0], taus[1]) : invert(taus[0])).canonical();
    j["tableau"] = tableau_json(r);
    text = format_tableau(r);
  } else if (op == "cocycle") {
    LCFunction c = cocycle(taus[0]).coarsen();
    j["function"] = function_json(c);
    text = format_function(c);
  } else {
    AfResult r = is_af(taus[0]);
    j["af"] = r.af;
    if (r.af) j["K"] = r.k;
    text = r.af ? "Yes K=" + std::to_string(r.k) + "\n" : "No\n";
  }
  if (cfg.json()) emit_json(j);
  else std::cout << text;
  return Ok;
}

std::string compact(LCFunction const &f) {
  std::string s = "depth=" + std::to_string(f.depth());
  if (f.depth() == 0) return s + " -:" + std::to_string(*f.constant_value());
  for (auto const &[w, v] : f.table()) s += " " + format_word(w, f.matrix().size()) + ":" + std::to_string(v);
  return s;
}

int cmd_verify_cert(Config const &cfg, std::string const &fwd, std::string const &bwd) {
  HomeoCertificate c(load_transducer(fwd), load_transducer(bwd));
  Json j;
  j["forward"] = stem(fwd);
  j["backward"] = stem(bwd);
  auto hv = verify_homeomorphism(c);
  j["homeomorphism"] = hv.verified ? "Verified" : "Failed";
  int code = Ok;
  if (!hv.verified) {
    j["failing_side"] = hv.failing_side.empty() ? "-" : hv.failing_side;
    int alphabet = hv.failing_side == "B" ? c.b().size() : c.a().size();
    j["witness"] = hv.witness ? hv.witness->to_string(alphabet) : "-";
    j["detail"] = hv.detail;
    code = ExpectationFailed;
  } else {
    auto data = extract_coe_data(c, {cfg.search_bound, cfg.max_depth});
    j["coe_data"] = data ? "Found" : "Inconclusive";
    if (data) {
      j["k1"] = compact(data->k1);
      j["l1"] = compact(data->l1);
      j["k2"] = compact(data->k2);
      j["l2"] = compact(data->l2);
      j["c1"] = compact(data->c1().coarsen());
      j["c2"] = compact(data->c2().coarsen());
      j["coe_equations"] = verify_coe_data(c, *data) ? "Verified" : "Failed";
      auto sc = scoe_check(c, *data, cfg.max_depth);
      j["scoe"] = sc.verdict == Verdict::Yes ? "Established" : sc.verdict == Verdict::No ? "Refuted" : "Unknown";
      auto samples = std::vector<Point>{};
      for (auto const &cyc : periodic_orbits(c.b(), 4)) samples.push_back(Point::periodic(cyc));
      j["lemma_identity"] = check_lemma_useful(c, *data, samples) ? "holds" : "fails";
    }
    auto ev = verify_eventual_conjugacy(c, cfg.k_bound);
    j["eventual_conjugacy"] = ev.verified ? "Verified" : "Failed";
    if (ev.verified) {
      j["K1"] = ev.k1;
      j["K2"] = ev.k2;
      auto uc = verify_ucoe(c, 2, cfg.k_bound);
      j["ucoe_generators"] = uc.verified ? "Verified" : "Failed";
      j["ucoe_generators_tested"] = uc.tested;
    }
  }
  if (cfg.json()) emit_json(j);
  else std::cout << flat_text(j);
  return code;
}

int cmd_examples(Config const &cfg, std::string const &data_dir, std::string golden_path) {
  if (golden_path.empty()) golden_path = (fs::path(data_dir) / "expected.txt").string();
  GoldenTable golden = parse_golden(read_file(golden_path));
  SuiteOutcome o = run_examples(data_dir, golden, cfg.classify_options());
  if (cfg.json()) emit_json(suite_json(o));
  else std::cout << suite_text(o);
  if (auto first = o.first_failure()) std::cerr << "first failing expectation: " << *first << "\n";
  if (o.contradiction) return Contradiction;
  return o.failed() ? ExpectationFailed : Ok;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Exact toolkit for one-sided topological Markov shifts"};
  app.require_subcommand(1);
  Config cfg;
  app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--search-bound", cfg.search_bound, "Largest orbit time tried per cylinder")->check(CLI::PositiveNumber);
  app.add_option("--max-depth", cfg.max_depth, "Largest cylinder / witness depth")->check(CLI::PositiveNumber);
  app.add_option("--k-bound", cfg.k_bound, "Largest eventual-conjugacy constant tried")->check(CLI::PositiveNumber);
  app.add_option("--inner-dim", cfg.inner_dim, "Largest inner dimension for strong shift equivalence search")
      ->check(CLI::PositiveNumber);

  std::vector<std::string> inv_files;
  auto *inv = app.add_subcommand("invariants", "Invariants of one or more matrices")->fallthrough();
  inv->add_option("matrix", inv_files, "Matrix files")->required();

  std::string ca, cb;
  std::vector<std::vector<std::string>> certs;
  auto *cls = app.add_subcommand("classify", "Relation report for a pair of matrices")->fallthrough();
  cls->add_option("A", ca, "First matrix file")->required();
  cls->add_option("B", cb, "Second matrix file")->required();
  cls->add_option("--cert", certs, "Forward and backward transducer files")->expected(2)->allow_extra_args(false);

  std::string fg_op, fg_matrix;
  std::vector<std::string> fg_files;
  auto *fg = app.add_subcommand("fullgroup", "Operations on prefix-exchange tableaux")->fallthrough();
  fg->add_option("op", fg_op, "compose | invert | cocycle | is-af")
      ->required()
      ->check(CLI::IsMember({"compose", "invert", "cocycle", "is-af"}));
  fg->add_option("tableaux", fg_files, "Tableau files")->required();
  fg->add_option("--matrix", fg_matrix, "Matrix file")->required();

  std::string vf, vb;
  auto *vc = app.add_subcommand("verify-cert", "Verify a homeomorphism certificate")->fallthrough();
  vc->add_option("forward", vf, "Forward transducer file")->required();
  vc->add_option("backward", vb, "Backward transducer file")->required();

  std::string data_dir = ORBITEQ_DATA_DIR, golden;
  auto *ex = app.add_subcommand("examples", "Run the example matrix suite against the golden table")->fallthrough();
  ex->add_option("--data-dir", data_dir, "Directory with the matrix files");
  ex->add_option("--golden", golden, "Golden table (default <data-dir>/expected.txt)");

  try {
    app.parse(argc, argv);
  } catch (CLI::CallForHelp const &e) {
    return app.exit(e);
  } catch (CLI::CallForAllHelp const &e) {
    return app.exit(e);
  } catch (CLI::ParseError const &e) {
    app.exit(e);
    return InvalidInput;
  }

  try {
    if (*inv) return cmd_invariants(cfg, inv_files);
    if (*cls) return cmd_classify(cfg, ca, cb, certs);
    if (*fg) return cmd_fullgroup(cfg, fg_op, fg_matrix, fg_files);
    if (*vc) return cmd_verify_cert(cfg, vf, vb);
    if (*ex) return cmd_examples(cfg, data_dir, golden);
  } catch (MatrixError const &e) {
    std::cerr << "error: " << e.what() << "\n";
    return InvalidInput;
  } catch (TableauError const &e) {
    std::cerr << "error: " << e.what() << "\n";
    return InvalidInput;
  } catch (TransducerError const &e) {
    std::cerr << "error: " << e.what() << "\n";
    return InvalidInput;
  } catch (ContradictoryEvidence const &e) {
    std::cerr << "error: ContradictoryEvidence: " << e.what() << "\n";
    return Contradiction;
  } catch (InputError const &e) {
    std::cerr << "error: " << e.what() << "\n";
    return InvalidInput;
  } catch (std::invalid_argument const &e) {
    std::cerr << "error: " << e.what() << "\n";
    return InvalidInput;
  }
  return InvalidInput;
}
