// caretlab: batch front end for the tree, measure, magma, Thompson-group,
// construction and Ramsey routines. Every run prints a report made of
// `meta.*` lines (configuration echo and wall time) and a payload that is a
// pure function of the flags and input files.

#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>

#include "caretlab/caretlab.hpp"

using namespace caretlab;

namespace {

constexpr const char* kVersion = "0.1.0";

enum class Exit : int { ok = 0, error = 1, negative = 2 };

struct Config {
  std::uint64_t seed = 0;
  std::size_t cap_size = kDefaultTreeCap;
  std::size_t budget = 2000;
  double tol = 1e-8;
  std::string threshold = "1/2";
  std::string out;
  std::string format = "text";
  std::size_t threads = default_thread_count();
};

class Report {
 public:
  void meta(const std::string& key, const std::string& value) { meta_.emplace_back(key, value); }
  void field(const std::string& key, const std::string& value) { fields_.emplace_back(key, value); }
  void field(const std::string& key, const Rational& value) { field(key, format_rational(value)); }
  void field(const std::string& key, bool value) { field(key, std::string(value ? "true" : "false")); }
  void field(const std::string& key, const char* value) { field(key, std::string(value)); }
  template <class I>
    requires std::is_integral_v<I>
  void field(const std::string& key, I value) {
    field(key, std::to_string(value));
  }

  void table(std::string name, std::vector<std::string> header) {
    table_name_ = std::move(name);
    header_ = std::move(header);
  }
  void row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }

  std::string render(const std::string& format) const {
    std::ostringstream out;
    if (format == "csv") {
      for (const auto& [k, v] : meta_) out << "# meta." << k << " = " << v << "\n";
      if (!header_.empty()) {
        for (const auto& [k, v] : fields_) out << "# " << k << " = " << v << "\n";
        out << join(header_) << "\n";
        for (const auto& r : rows_) out << join(r) << "\n";
      } else {
        out << "key,value\n";
        for (const auto& [k, v] : fields_) out << k << "," << v << "\n";
      }
      return out.str();
    }
    for (const auto& [k, v] : meta_) out << "meta." << k << " = " << v << "\n";
    for (const auto& [k, v] : fields_) out << k << " = " << v << "\n";
    for (std::size_t i = 0; i < rows_.size(); ++i)
      for (std::size_t c = 0; c < header_.size() && c < rows_[i].size(); ++c)
        out << table_name_ << "." << i << "." << header_[c] << " = " << rows_[i][c] << "\n";
    return out.str();
  }

 private:
  static std::string join(const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) s += ',';
      s += cells[i];
    }
    return s;
  }

  std::vector<std::pair<std::string, std::string>> meta_, fields_;
  std::string table_name_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::vector<std::string> split_list(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    const auto b = cur.find_first_not_of(' ');
    const auto e = cur.find_last_not_of(' ');
    out.push_back(b == std::string::npos ? std::string() : cur.substr(b, e - b + 1));
  }
  return out;
}

std::vector<Rational> parse_rational_list(const std::string& s) {
  std::vector<Rational> out;
  for (const auto& item : split_list(s)) out.push_back(parse_rational(item));
  return out;
}

std::vector<long long> parse_int_list(const std::string& s) {
  std::vector<long long> out;
  for (const auto& item : split_list(s)) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw DomainError("'" + item + "' is not an integer");
    out.push_back(v);
  }
  return out;
}

std::string bits_string(const std::vector<int>& bits) {
  std::string s;
  for (int b : bits) s += static_cast<char>('0' + b);
  return s;
}

Tree read_tree_arg(const std::string& text) { return parse_tree(text); }

Measure<Tree> read_tree_measure(const std::string& path) { return parse_tree_measure(read_file(path)); }

void emit_tree_measure(Report& rep, const std::string& prefix, const Measure<Tree>& mu) {
  rep.table(prefix, {"tree", "weight"});
  for (const auto& [t, w] : mu) rep.row({format_tree(t), format_rational(w)});
}

void emit_element_measure(Report& rep, const std::string& prefix, const Measure<Element>& mu) {
  rep.table(prefix, {"element", "weight"});
  for (const auto& [x, w] : mu) rep.row({std::to_string(x), format_rational(w)});
}

// Shortest text that reads back as the same double.
std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string format_copy_weights(const EmbeddingCopy& copy) {
  std::string s;
  for (std::size_t j = 0; j < copy.weights.size(); ++j) {
    if (j) s += ";";
    s += format_rational(copy.weights[j]) + "*[" + format_embedding(copy.embeddings[j]) + "]";
  }
  return s;
}

std::function<std::optional<std::size_t>(const Tree&)> named_label(const std::string& name) {
  if (name == "size-parity") return [](const Tree& t) { return std::optional<std::size_t>(t.size() % 2); };
  if (name == "left-depth-parity") return [](const Tree& t) { return std::optional<std::size_t>(left_depth(t) % 2); };
  if (name == "left-comb") {
    return [](const Tree& t) { return std::optional<std::size_t>(t == left_comb(t.size()) ? 1 : 0); };
  }
  throw DomainError("unknown label '" + name + "' (expected size-parity, left-depth-parity or left-comb)");
}

// ---------------------------------------------------------------------------

struct Cli {
  Config cfg;
  std::function<Exit(Report&)> action;
  std::string command;
};

void add_common(CLI::App* app, Config& cfg) {
  app->add_option("--seed", cfg.seed, "64-bit seed for randomized runs");
  app->add_option("--cap-size", cfg.cap_size, "largest tree size any step may build")->check(CLI::PositiveNumber);
  app->add_option("--budget", cfg.budget, "search budget (LP evaluations or restarts)")->check(CLI::PositiveNumber);
  app->add_option("--tol", cfg.tol, "numeric tolerance")->check(CLI::PositiveNumber);
  app->add_option("--threshold", cfg.threshold, "oscillation threshold p/q (default 1/2)");
  app->add_option("--out", cfg.out, "write the report here instead of stdout");
  app->add_option("--format", cfg.format, "report format")->check(CLI::IsMember({"text", "csv"}));
  app->add_option("--threads", cfg.threads, "worker threads")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"caretlab: finite experiments on the free binary system of trees"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Cli cli;
  Config& cfg = cli.cfg;
  add_common(&app, cfg);
  app.fallthrough();

  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help) {
    CLI::App* sub = parent->add_subcommand(name, help);
    sub->fallthrough();
    sub->parse_complete_callback([&cli, parent, name] { cli.command = parent->get_name() + " " + name; });
    return sub;
  };
  auto group = [&](const std::string& name, const std::string& help) {
    CLI::App* g = app.add_subcommand(name, help);
    g->require_subcommand(1);
    g->fallthrough();
    return g;
  };

  // ----- trees ---------------------------------------------------------------
  CLI::App* trees = group("trees", "enumerate trees and report their statistics");
  std::size_t size = 0;
  std::string tree_text, address_text, indices_text;
  std::optional<std::size_t> prune_k;
  {
    auto* enum_cmd = leaf(trees, "enum", "list T_n in canonical order");
    enum_cmd->add_option("--size", size, "number of leaves")->required()->check(CLI::PositiveNumber);
    enum_cmd->final_callback([&] {
      cli.action = [&](Report& rep) {
        TreeCatalog catalog(cfg.cap_size);
        const auto& ts = catalog.trees(size);
        rep.field("size", size);
        rep.field("count", ts.size());
        rep.table("tree", {"index", "tree"});
        for (std::size_t i = 0; i < ts.size(); ++i) rep.row({std::to_string(i), format_tree(ts[i])});
        return Exit::ok;
      };
    });

    auto* stats_cmd = leaf(trees, "stats", "size, left depth, right spine, dyadic set and more");
    stats_cmd->add_option("--tree", tree_text, "tree in parenthesized form");
    stats_cmd->add_option("--size", size, "report every tree of this size instead");
    stats_cmd->add_option("--address", address_text, "also report the subterm at this 0/1 address");
    stats_cmd->add_option("--prune", prune_k, "also report the pruned tree t_k");
    stats_cmd->add_option("--indices", indices_text, "comma list i_0<...<i_{m-1}: admissibility check");
    stats_cmd->final_callback([&] {
      cli.action = [&](Report& rep) {
        if (!tree_text.empty()) {
          const Tree t = read_tree_arg(tree_text);
          if (t.size() > cfg.cap_size) throw CapExceeded("tree exceeds --cap-size");
          const auto st = tree_stats(t);
          rep.field("tree", format_tree(t));
          rep.field("size", st.size);
          rep.field("left_depth", st.left_depth);
          rep.field("right_spine", st.right_spine);
          rep.field("rank", tree_rank(t));
          std::string d;
          for (const auto& q : dyadic_repr(t)) d += (d.empty() ? "" : " ") + format_rational(q);
          rep.field("dyadic", d);
          if (!address_text.empty()) {
            const auto a = Address::parse(address_text);
            const auto s = try_subterm(t, a);
            rep.field("subterm", s ? format_tree(*s) : std::string("undefined"));
          }
          if (prune_k) rep.field("pruned", format_tree(prune(t, *prune_k)));
          if (!indices_text.empty()) {
            const auto idx = parse_int_list(indices_text);
            const auto adm = admissibility(t, idx);
            std::string b;
            for (auto v : adm.bounds) b += (b.empty() ? "" : " ") + std::to_string(v);
            rep.field("bounds", b);
            rep.field("admissible", adm.admissible);
          }
          return Exit::ok;
        }
        if (size == 0) throw DomainError("give --tree or --size");
        TreeCatalog catalog(cfg.cap_size);
        rep.field("size", size);
        rep.table("tree", {"index", "tree", "size", "left_depth", "right_spine"});
        const auto& ts = catalog.trees(size);
        for (std::size_t i = 0; i < ts.size(); ++i) {
          const auto st = tree_stats(ts[i]);
          rep.row({std::to_string(i), format_tree(ts[i]), std::to_string(st.size), std::to_string(st.left_depth),
                   std::to_string(st.right_spine)});
        }
        return Exit::ok;
      };
    });
  }

  // ----- measure -------------------------------------------------------------
  CLI::App* measure = group("measure", "convolve, evaluate and push forward finite measures");
  std::string mu_path, nu_path, magma_path, coloring_path, map_name, r_bits, f_text, values_text;
  Element g_elem = 0;
  {
    auto* conv = leaf(measure, "conv", "μ ^ ν on trees, or μ ⋆ ν on a magma with --magma");
    conv->add_option("--mu", mu_path, "measure CSV")->required();
    conv->add_option("--nu", nu_path, "measure CSV")->required();
    conv->add_option("--magma", magma_path, "convolve element measures in this magma");
    conv->final_callback([&] {
      cli.action = [&](Report& rep) {
        if (!magma_path.empty()) {
          const Magma m = parse_magma(read_file(magma_path));
          const auto mu = parse_element_measure(read_file(mu_path));
          const auto nu = parse_element_measure(read_file(nu_path));
          for (const auto* x : {&mu, &nu})
            for (const auto& [e, w] : *x)
              if (!m.contains(e)) throw DomainError("measure charges element " + std::to_string(e) + " outside the magma");
          emit_element_measure(rep, "result", convolve(m, mu, nu));
          return Exit::ok;
        }
        const auto mu = read_tree_measure(mu_path);
        const auto nu = read_tree_measure(nu_path);
        emit_tree_measure(rep, "result", convolve(CaretOp{}, mu, nu));
        return Exit::ok;
      };
    });

    auto* eval = leaf(measure, "eval", "∫ c dμ for a coloring file, or f∘ev with --magma/--values");
    eval->add_option("--mu", mu_path, "measure CSV")->required();
    eval->add_option("--coloring", coloring_path, "coloring CSV of T_n");
    eval->add_option("--magma", magma_path, "magma file (with --values and --g)");
    eval->add_option("--g", g_elem, "image of the leaf under the evaluation map");
    eval->add_option("--values", values_text, "comma list f(0),...,f(k-1)");
    eval->final_callback([&] {
      cli.action = [&](Report& rep) {
        const auto mu = read_tree_measure(mu_path);
        if (!coloring_path.empty()) {
          const Coloring c = parse_coloring(read_file(coloring_path), cfg.cap_size);
          rep.field("value", c(mu));
          return Exit::ok;
        }
        if (magma_path.empty() || values_text.empty()) throw DomainError("give --coloring, or --magma with --values");
        const EvaluationHom ev(parse_magma(read_file(magma_path)), g_elem);
        const auto f = parse_rational_list(values_text);
        if (f.size() != ev.magma().order()) throw DomainError("--values needs one entry per magma element");
        rep.field("value", evaluate([&](const Tree& t) { return f[ev(t)]; }, mu));
        return Exit::ok;
      };
    });

    auto* push = leaf(measure, "push", "pushforward along h_r, an element of F, or an evaluation map");
    push->add_option("--mu", mu_path, "measure CSV")->required();
    push->add_option("--map", map_name, "hr | f | ev")->required()->check(CLI::IsMember({"hr", "f", "ev"}));
    push->add_option("--r", r_bits, "bit prefix for --map hr");
    push->add_option("--f", f_text, "element of F for --map f ('s -> t' or xK)");
    push->add_option("--magma", magma_path, "magma file for --map ev");
    push->add_option("--g", g_elem, "leaf image for --map ev");
    push->final_callback([&] {
      cli.action = [&](Report& rep) {
        const auto mu = read_tree_measure(mu_path);
        if (map_name == "hr") {
          emit_tree_measure(rep, "result", h_r_push(mu, BitPrefix::parse(r_bits)));
        } else if (map_name == "f") {
          const FElement f = parse_felement(f_text);
          emit_tree_measure(rep, "result", pushforward([&](const Tree& t) { return partial_apply(f, t); }, mu));
        } else {
          const EvaluationHom ev(parse_magma(read_file(magma_path)), g_elem);
          emit_element_measure(rep, "result", pushforward([&](const Tree& t) { return ev(t); }, mu));
        }
        return Exit::ok;
      };
    });
  }

  // ----- magma ---------------------------------------------------------------
  CLI::App* magma = group("magma", "idempotent measures and quotient systems of finite magmas");
  std::string method_name = "damped";
  std::size_t order = 0, instances = 0, max_size = 6;
  bool all_tables = false;
  std::string label_name, large_text;
  {
    auto* idem = leaf(magma, "idem", "search for an idempotent probability measure");
    idem->add_option("--magma", magma_path, "magma file")->required();
    idem->add_option("--method", method_name, "damped | residual-descent | exhaustive-support");
    idem->final_callback([&] {
      cli.action = [&](Report& rep) {
        const Magma m = parse_magma(read_file(magma_path));
        SolveOptions opt;
        opt.tol = cfg.tol;
        opt.seed = cfg.seed;
        opt.method = parse_solve_method(method_name);
        const auto r = find_idempotent(m, opt);
        rep.field("success", r.success);
        rep.field("method", to_string(r.method));
        rep.field("seed", r.seed);
        rep.field("iterations", r.iterations);
        rep.field("residual", r.residual);
        rep.field("denominator_cap", r.denominator_cap);
        if (!r.note.empty()) rep.field("note", r.note);
        for (std::size_t i = 0; i < r.float_weights.size(); ++i)
          rep.field("float." + std::to_string(i), format_double(r.float_weights[i]));
        emit_element_measure(rep, "measure", r.measure);
        return Exit::ok;
      };
    });

    auto* classify = leaf(magma, "classify", "exact small-support idempotents, or a solver sweep over many tables");
    classify->add_option("--magma", magma_path, "list exact idempotents with support <= 2 of this magma");
    classify->add_option("--order", order, "sweep tables of this order");
    classify->add_option("--instances", instances, "number of seeded random tables (sweep mode)");
    classify->add_flag("--all", all_tables, "sweep every table of the given order");
    classify->add_option("--method", method_name, "solver for the sweep");
    classify->final_callback([&] {
      cli.action = [&](Report& rep) {
        if (!magma_path.empty()) {
          const Magma m = parse_magma(read_file(magma_path));
          const auto sols = exact_small_support_idempotents(m);
          rep.field("count", sols.size());
          rep.table("idempotent", {"support", "weight_on_first", "exact", "continuum"});
          for (const auto& s : sols) {
            std::string sup;
            for (auto e : s.support) sup += (sup.empty() ? "" : " ") + std::to_string(e);
            rep.row({sup, s.weight_expression, s.measure ? "true" : "false", s.continuum ? "true" : "false"});
          }
          return Exit::ok;
        }
        if (order < 1 || order > 4) throw DomainError("--order must be between 1 and 4 for a sweep");
        std::size_t total = instances;
        if (all_tables) {
          if (magma_count(order) > 1000000) throw CapExceeded("too many tables for --all");
          total = static_cast<std::size_t>(magma_count(order));
        }
        if (total == 0) throw DomainError("give --all or --instances N");
        SolveOptions opt;
        opt.tol = cfg.tol;
        opt.method = parse_solve_method(method_name);
        struct Item {
          std::string table;
          bool success = false;
          Rational residual;
          std::size_t iterations = 0;
        };
        const auto items = parallel_map(total, cfg.threads, [&](std::size_t i) {
          Magma m;
          if (all_tables) {
            m = magma_from_code(order, i);
          } else {
            std::mt19937_64 rng(cfg.seed + i);
            m = random_magma(order, rng);
          }
          SolveOptions o = opt;
          o.seed = cfg.seed + i;
          const auto r = find_idempotent(m, o);
          std::string code;
          for (auto e : m.table()) code += std::to_string(e);
          return Item{code, r.success, r.residual, r.iterations};
        });
        std::size_t ok = 0, max_it = 0;
        Rational worst = 0;
        rep.table("instance", {"index", "table", "success", "residual", "iterations"});
        for (std::size_t i = 0; i < items.size(); ++i) {
          ok += items[i].success;
          max_it = std::max(max_it, items[i].iterations);
          if (items[i].residual > worst) worst = items[i].residual;
          rep.row({std::to_string(i), items[i].table, items[i].success ? "true" : "false",
                   format_rational(items[i].residual), std::to_string(items[i].iterations)});
        }
        rep.field("order", order);
        rep.field("instances", total);
        rep.field("successes", ok);
        rep.field("max_residual", worst);
        rep.field("max_iterations", max_it);
        return Exit::ok;
      };
    });

    auto* quotient = leaf(magma, "quotient", "induce an operation on the labels of trees");
    quotient->add_option("--label", label_name, "size-parity | left-depth-parity | left-comb")->required();
    quotient->add_option("--max-size", max_size, "largest a^b size examined");
    quotient->add_option("--large", large_text, "comma list of sizes allowed for a and b (default 2..N)");
    quotient->final_callback([&] {
      cli.action = [&](Report& rep) {
        if (max_size > cfg.cap_size) throw CapExceeded("--max-size exceeds --cap-size");
        std::vector<std::size_t> large;
        if (!large_text.empty())
          for (auto v : parse_int_list(large_text)) {
            if (v < 1) throw DomainError("--large sizes must be positive");
            large.push_back(static_cast<std::size_t>(v));
          }
        TreeCatalog catalog(cfg.cap_size);
        const auto q = quotient_system(named_label(label_name), max_size, large, catalog);
        if (q.violation) {
          const auto& v = *q.violation;
          rep.field("well_defined", false);
          rep.field("a", format_tree(v.a));
          rep.field("b", format_tree(v.b));
          rep.field("label_ab", v.first_value);
          rep.field("a2", format_tree(v.a2));
          rep.field("b2", format_tree(v.b2));
          rep.field("label_a2b2", v.second_value);
          return Exit::negative;
        }
        rep.field("well_defined", true);
        std::string text = format_magma(*q.magma);
        for (auto& ch : text)
          if (ch == '\n') ch = '/';
        rep.field("magma", text);
        return Exit::ok;
      };
    });
  }

  // ----- hindman -------------------------------------------------------------
  CLI::App* hindman = group("hindman", "pair sequences with nearly constant colour");
  std::string eps_text = "1/100";
  std::size_t count = 5;
  {
    auto* pairs = leaf(hindman, "pairs", "build μ_1..μ_count with c(μ_i) and c(μ_i ^ μ_j) near r");
    pairs->add_option("--magma", magma_path, "magma file")->required();
    pairs->add_option("--g", g_elem, "image of the leaf");
    pairs->add_option("--values", values_text, "comma list f(0),...,f(k-1) (default: identity)");
    pairs->add_option("--eps", eps_text, "tolerance ε as p/q");
    pairs->add_option("--count", count, "number of measures")->check(CLI::PositiveNumber);
    pairs->final_callback([&] {
      cli.action = [&](Report& rep) {
        const Magma m = parse_magma(read_file(magma_path));
        std::vector<Rational> f;
        if (values_text.empty()) {
          for (std::size_t i = 0; i < m.order(); ++i) f.emplace_back(static_cast<unsigned long>(i));
        } else {
          f = parse_rational_list(values_text);
        }
        PairEngineOptions opt;
        opt.cap = cfg.cap_size;
        opt.seed = cfg.seed;
        const auto res = hindman_pair_engine(m, g_elem, f, parse_rational(eps_text), count, opt);
        rep.field("r", res.r);
        rep.field("block", res.block);
        std::string core;
        for (auto e : res.core) core += (core.empty() ? "" : " ") + std::to_string(e);
        rep.field("core", core);
        for (const auto& [e, w] : res.nu) rep.field("nu." + std::to_string(e), w);
        rep.field("nu_residual", res.nu_residual);
        rep.field("rounding_l1", res.rounding_l1);
        for (std::size_t i = 0; i < res.mus.size(); ++i) {
          std::string s;
          for (const auto& [t, w] : res.mus[i]) s += (s.empty() ? "" : "; ") + format_rational(w) + " " + format_tree(t);
          rep.field("mu." + std::to_string(i + 1), s);
        }
        rep.field("max_deviation", res.max_deviation);
        rep.field("certified", res.certified);
        rep.table("check", {"i", "j", "value", "deviation"});
        for (const auto& c : res.checks)
          rep.row({std::to_string(c.i), c.j ? std::to_string(c.j) : std::string("-"), format_rational(c.value),
                   format_rational(c.deviation)});
        return res.certified ? Exit::ok : Exit::negative;
      };
    });
  }

  // ----- f -------------------------------------------------------------------
  CLI::App* fgroup = group("f", "Thompson's group F as tree pairs");
  std::string g_text;
  long long power_k = 1;
  {
    auto* act = leaf(fgroup, "act", "partial action f · t");
    act->add_option("--f", f_text, "'s -> t' or xK")->required();
    act->add_option("--tree", tree_text, "tree")->required();
    act->final_callback([&] {
      cli.action = [&](Report& rep) {
        const FElement f = parse_felement(f_text);
        const auto r = partial_apply(f, read_tree_arg(tree_text));
        rep.field("f", format_felement(f));
        rep.field("defined", r.has_value());
        rep.field("result", r ? format_tree(*r) : std::string("undefined"));
        return Exit::ok;
      };
    });

    auto* comp = leaf(fgroup, "compose", "f ∘ g (g first), or f^k with --power");
    comp->add_option("--f", f_text, "'s -> t' or xK")->required();
    comp->add_option("--g", g_text, "'s -> t' or xK");
    comp->add_option("--power", power_k, "exponent when --g is absent");
    comp->final_callback([&] {
      cli.action = [&](Report& rep) {
        const FElement f = parse_felement(f_text);
        const FElement r = g_text.empty() ? power(f, power_k) : compose(f, parse_felement(g_text));
        rep.field("result", format_felement(r));
        rep.field("inverse", format_felement(invert(r)));
        rep.field("identity", r.is_identity());
        return Exit::ok;
      };
    });

    auto* defect = leaf(fgroup, "defect", "undefined mass and total-variation defect of f·μ");
    defect->add_option("--f", f_text, "'s -> t' or xK")->required();
    defect->add_option("--mu", mu_path, "measure CSV")->required();
    defect->final_callback([&] {
      cli.action = [&](Report& rep) {
        const auto d = invariance_defect(read_tree_measure(mu_path), parse_felement(f_text));
        rep.field("undefined_mass", d.undefined_mass);
        rep.field("tv_defect", d.tv_defect);
        return Exit::ok;
      };
    });
  }

  // ----- stats ---------------------------------------------------------------
  CLI::App* stats = group("stats", "subterm-order statistics of a measure");
  std::string sigma_text, varsigma_text;
  {
    auto* addr = leaf(stats, "addresses", "compare #(t/σ) with #(t/ς) under μ");
    addr->add_option("--mu", mu_path, "measure CSV")->required();
    addr->add_option("--sigma", sigma_text, "address σ")->required();
    addr->add_option("--varsigma", varsigma_text, "address ς")->required();
    addr->final_callback([&] {
      cli.action = [&](Report& rep) {
        const auto p = address_profile(read_tree_measure(mu_path), Address::parse(sigma_text),
                                       Address::parse(varsigma_text), SizeOrder{});
        rep.field("less", p.less);
        rep.field("greater", p.greater);
        rep.field("equiv", p.equiv);
        rep.field("undefined", p.undefined);
        return Exit::ok;
      };
    });

    auto* mono = leaf(stats, "monotonicity", "mass of the two strict size chains along 001, 01, 10");
    mono->add_option("--mu", mu_path, "measure CSV")->required();
    mono->final_callback([&] {
      cli.action = [&](Report& rep) {
        const auto p = monotonicity_profile(read_tree_measure(mu_path));
        rep.field("chain_a", p.chain_a);
        rep.field("chain_b", p.chain_b);
        rep.field("other", p.other);
        return Exit::ok;
      };
    });
  }

  // ----- constructions -------------------------------------------------------
  CLI::App* cons = group("constructions", "u_σ words, h_r, the odometer and the subsystems E");
  std::size_t p_bits = 0, n_level = 0;
  {
    auto* hr = leaf(cons, "hr", "h_r of a tree or a measure");
    hr->add_option("--tree", tree_text, "tree");
    hr->add_option("--mu", mu_path, "measure CSV");
    hr->add_option("--r", r_bits, "bit prefix r")->required();
    hr->final_callback([&] {
      cli.action = [&](Report& rep) {
        const auto r = BitPrefix::parse(r_bits);
        if (!tree_text.empty()) {
          rep.field("result", format_tree(h_r_tree(read_tree_arg(tree_text), r)));
          return Exit::ok;
        }
        if (mu_path.empty()) throw DomainError("give --tree or --mu");
        emit_tree_measure(rep, "result", h_r_push(read_tree_measure(mu_path), r));
        return Exit::ok;
      };
    });

    auto* usig = leaf(cons, "usigma", "the word u_σ");
    usig->add_option("--sigma", sigma_text, "nonempty 0/1 string")->required();
    usig->final_callback([&] {
      cli.action = [&](Report& rep) {
        const Tree u = u_sigma(BitPrefix::parse(sigma_text));
        rep.field("tree", format_tree(u));
        rep.field("size", u.size());
        return Exit::ok;
      };
    });

    auto* odo = leaf(cons, "odometer", "first p bits of h(t), and E_{r,p} membership with --r");
    odo->add_option("--tree", tree_text, "tree")->required();
    odo->add_option("--p", p_bits, "number of bits")->required();
    odo->add_option("--r", r_bits, "bit prefix r");
    odo->final_callback([&] {
      cli.action = [&](Report& rep) {
        const Tree t = read_tree_arg(tree_text);
        rep.field("bits", bits_string(odometer_bits(t, p_bits)));
        if (!r_bits.empty()) rep.field("in_E_rp", in_E_rp(t, BitPrefix::parse(r_bits), p_bits));
        return Exit::ok;
      };
    });

    auto* er = leaf(cons, "er", "membership of t in E_{r,n}");
    er->add_option("--tree", tree_text, "tree")->required();
    er->add_option("--r", r_bits, "bit prefix r")->required();
    er->add_option("--n", n_level, "level n")->required();
    er->final_callback([&] {
      cli.action = [&](Report& rep) {
        rep.field("in_E_rn", in_E_r(read_tree_arg(tree_text), BitPrefix::parse(r_bits), n_level));
        return Exit::ok;
      };
    });
  }

  // ----- ramsey --------------------------------------------------------------
  CLI::App* ramsey = group("ramsey", "copies of T_m in A_n with small oscillation");
  std::size_t m_level = 0, n_target = 0, max_n = 0;
  std::string witness_out;
  {
    auto* solve = leaf(ramsey, "solve", "least oscillation over all copies (exact LP)");
    solve->add_option("--coloring", coloring_path, "coloring CSV of T_n")->required();
    solve->add_option("--m", m_level, "domain level m")->required()->check(CLI::PositiveNumber);
    solve->final_callback([&] {
      cli.action = [&](Report& rep) {
        const Coloring c = parse_coloring(read_file(coloring_path), cfg.cap_size);
        TreeCatalog catalog(cfg.cap_size);
        const EmbeddingTable table(m_level, c.n(), catalog);
        const auto r = min_oscillation_copy(c, table);
        rep.field("m", m_level);
        rep.field("n", c.n());
        rep.field("embeddings", table.embeddings().size());
        rep.field("oscillation", r.oscillation);
        rep.field("certified_by", r.optimum.from_lp ? "lp-duality" : "constant-embedding");
        rep.field("copy", format_copy_weights(r.copy));
        rep.table("value", {"tree", "value"});
        for (std::size_t t = 0; t < table.domain().size(); ++t)
          rep.row({format_tree(table.domain()[t]), format_rational(r.optimum.values[t])});
        return Exit::ok;
      };
    });

    auto* constant = leaf(ramsey, "constant", "a copy on which a 0/1 coloring is constant, or a proof of none");
    constant->add_option("--coloring", coloring_path, "0/1 coloring CSV of T_n")->required();
    constant->add_option("--m", m_level, "domain level m")->required()->check(CLI::PositiveNumber);
    constant->final_callback([&] {
      cli.action = [&](Report& rep) {
        const Coloring c = parse_coloring(read_file(coloring_path), cfg.cap_size);
        TreeCatalog catalog(cfg.cap_size);
        const EmbeddingTable table(m_level, c.n(), catalog);
        const auto r = constant_copy_exists(c, table);
        rep.field("exists", r.copy.has_value());
        if (r.copy) {
          rep.field("constant", *r.constant);
          rep.field("copy", format_copy_weights(*r.copy));
          return Exit::ok;
        }
        std::string ray;
        for (const auto& y : r.farkas) ray += (ray.empty() ? "" : " ") + format_rational(y);
        rep.field("farkas", ray);
        rep.field("farkas_verified", verify_farkas(r.lp, r.farkas));
        return Exit::negative;
      };
    });

    auto* adversary = leaf(ramsey, "adversary", "local search for a coloring with no low-oscillation copy");
    adversary->add_option("--m", m_level, "domain level m")->required()->check(CLI::PositiveNumber);
    adversary->add_option("--n", n_target, "target level n")->required()->check(CLI::PositiveNumber);
    adversary->add_option("--witness-out", witness_out, "write the witness coloring CSV here");
    adversary->final_callback([&] {
      cli.action = [&](Report& rep) {
        TreeCatalog catalog(cfg.cap_size);
        const EmbeddingTable table(m_level, n_target, catalog);
        const Rational threshold = parse_rational(cfg.threshold);
        const auto r = adversarial_coloring_search(table, threshold, cfg.budget, cfg.seed, cfg.threads);
        rep.field("threshold", threshold);
        rep.field("evaluations", r.evaluations);
        rep.field("restarts", r.restarts);
        rep.field("found", r.witness.has_value());
        rep.field("best_oscillation", r.best_oscillation);
        if (r.witness) {
          rep.table("witness", {"tree", "value"});
          const auto& ts = catalog.trees(n_target);
          for (std::size_t i = 0; i < ts.size(); ++i) rep.row({format_tree(ts[i]), format_rational(r.witness->values()[i])});
          if (!witness_out.empty()) write_file(witness_out, format_coloring(*r.witness, catalog));
          return Exit::negative;
        }
        return Exit::ok;
      };
    });

    auto* scan = leaf(ramsey, "scan", "verdict per n: suffices, fails or unknown");
    scan->add_option("--m", m_level, "domain level m")->required()->check(CLI::PositiveNumber);
    scan->add_option("--max-n", max_n, "largest n to examine")->required();
    scan->final_callback([&] {
      cli.action = [&](Report& rep) {
        ScanOptions opt;
        opt.threshold = parse_rational(cfg.threshold);
        opt.budget = cfg.budget;
        opt.seed = cfg.seed;
        opt.threads = cfg.threads;
        opt.tree_cap = cfg.cap_size;
        const auto rows = scan_minimal_n(m_level, max_n, opt);
        rep.field("m", m_level);
        rep.field("threshold", opt.threshold);
        rep.table("row", {"n", "verdict", "certificate_kind", "oscillation"});
        bool any_suffices = false;
        TreeCatalog catalog(cfg.cap_size);
        for (const auto& row : rows) {
          any_suffices = any_suffices || row.verdict == Verdict::suffices;
          rep.row({std::to_string(row.n), to_string(row.verdict), row.certificate_kind, format_rational(row.oscillation)});
          if (row.witness) {
            std::string w;
            const auto& ts = catalog.trees(row.n);
            for (std::size_t i = 0; i < ts.size(); ++i)
              w += (w.empty() ? "" : "; ") + format_tree(ts[i]) + "=" + format_rational(row.witness->values()[i]);
            rep.field("witness.n" + std::to_string(row.n), w);
          }
          if (row.colorings_checked) rep.field("checked.n" + std::to_string(row.n), row.colorings_checked);
        }
        return any_suffices || rows.empty() ? Exit::ok : Exit::negative;
      };
    });

    auto* strong = leaf(ramsey, "strong", "search strong copies t ↦ t(μ_0, ..., μ_{m-1})");
    strong->add_option("--coloring", coloring_path, "coloring CSV of T_n")->required();
    strong->add_option("--m", m_level, "domain level m")->required()->check(CLI::PositiveNumber);
    strong->final_callback([&] {
      cli.action = [&](Report& rep) {
        const Coloring c = parse_coloring(read_file(coloring_path), cfg.cap_size);
        StrongSearchOptions opt;
        opt.budget = cfg.budget;
        opt.seed = cfg.seed;
        opt.tree_cap = cfg.cap_size;
        const auto r = strong_copy_search(c, m_level, opt);
        rep.field("exhaustive", r.exhaustive);
        rep.field("evaluations", r.evaluations);
        rep.field("restarts", r.restarts);
        if (!r.best) {
          rep.field("found", false);
          return Exit::ok;
        }
        rep.field("oscillation", r.best->oscillation);
        for (std::size_t i = 0; i < r.best->measures.size(); ++i) {
          std::string s;
          for (const auto& [t, w] : r.best->measures[i]) s += (s.empty() ? "" : "; ") + format_rational(w) + " " + format_tree(t);
          rep.field("mu." + std::to_string(i), s);
        }
        rep.table("value", {"tree", "value"});
        const auto domain = enumerate_trees(m_level, cfg.cap_size);
        for (std::size_t t = 0; t < domain.size(); ++t) rep.row({format_tree(domain[t]), format_rational(r.best->values[t])});
        return Exit::ok;
      };
    });
  }

  // ----- validate ------------------------------------------------------------
  std::vector<std::string> paths;
  {
    auto* validate = app.add_subcommand("validate", "check measure, coloring and magma files");
    validate->fallthrough();
    validate->add_option("paths", paths, "files to check")->required();
    validate->parse_complete_callback([&] { cli.command = "validate"; });
    validate->final_callback([&] {
      cli.action = [&](Report& rep) {
        bool all_ok = true;
        rep.table("file", {"path", "diagnostic"});
        for (const auto& p : paths) {
          std::string diag;
          try {
            diag = validate_artifact_text(read_file(p));
          } catch (const std::exception& e) {
            diag = e.what();
          }
          all_ok = all_ok && diag == "ok";
          rep.row({p, diag});
        }
        rep.field("ok", all_ok);
        return all_ok ? Exit::ok : Exit::negative;
      };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : static_cast<int>(Exit::error);
  }

  if (!cli.action) {
    std::cerr << "error: no command selected\n";
    return static_cast<int>(Exit::error);
  }
  const auto started = std::chrono::steady_clock::now();
  Report rep;
  Exit code = Exit::ok;
  try {
    code = cli.action(rep);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(Exit::error);
  }
  const auto elapsed =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started).count();

  rep.meta("command", cli.command);
  rep.meta("version", kVersion);
  rep.meta("seed", std::to_string(cfg.seed));
  rep.meta("cap_size", std::to_string(cfg.cap_size));
  rep.meta("budget", std::to_string(cfg.budget));
  rep.meta("tol", format_double(cfg.tol));
  rep.meta("threshold", cfg.threshold);
  rep.meta("threads", std::to_string(cfg.threads));
  rep.meta("exit_code", std::to_string(static_cast<int>(code)));
  rep.meta("wall_ms", std::to_string(elapsed));
  const std::string text = rep.render(cfg.format);
  try {
    if (cfg.out.empty()) {
      std::cout << text;
    } else {
      write_file(cfg.out, text);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(Exit::error);
  }
  return static_cast<int>(code);
}
