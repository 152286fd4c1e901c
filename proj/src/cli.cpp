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

#include "rstkit/cli.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "rstkit/attention_kernel.hpp"
#include "rstkit/edu_tracker.hpp"
#include "rstkit/error.hpp"
#include "rstkit/eval_metrics.hpp"
#include "rstkit/io_util.hpp"
#include "rstkit/keyphrase_textrank.hpp"
#include "rstkit/rst_attention.hpp"
#include "rstkit/rst_tree.hpp"
#include "rstkit/tree_edit.hpp"
#include "rstkit/tree_encoding.hpp"
#include "rstkit/tree_sampler.hpp"

namespace rstkit {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Header {
  std::string command;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> extra;
  std::vector<std::pair<std::string, std::uint64_t>> inputs;

  std::string str() const {
    std::string s = "# rstkit " + std::string(kVersion) + " " + command;
    s += " seed=" + (seed ? std::to_string(*seed) : std::string("none"));
    for (const auto& e : extra) s += " " + e;
    s += " inputs=";
    if (inputs.empty()) s += "none";
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      if (i) s += ',';
      s += inputs[i].first + ":" + hex64(inputs[i].second);
    }
    return s + "\n";
  }
};

std::string load(const std::string& path, Header& header) {
  std::string bytes = read_file(path);
  header.inputs.emplace_back(fs::path(path).filename().string(),
                             fnv1a64(bytes));
  return bytes;
}

RstTree load_tree(const std::string& path, Header& header) {
  return parse_tree(load(path, header));
}

std::vector<RstTree> load_corpus(const std::string& dir, Header& header) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw Error(ErrorCode::kIo, "not a directory: " + dir);
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".tree") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "no .tree files in " + dir);
  }
  std::vector<RstTree> corpus;
  std::string digest_input;
  for (const auto& f : files) {
    const std::string bytes = read_file(f);
    digest_input += f.filename().string();
    digest_input += '\0';
    digest_input += bytes;
    digest_input += '\0';
    try {
      corpus.push_back(parse_tree(bytes));
    } catch (const Error& e) {
      throw Error(e.code(), f.filename().string() + ": " + e.what());
    }
  }
  std::string name = fs::path(dir).filename().string();
  if (name.empty()) name = fs::path(dir).parent_path().filename().string();
  header.inputs.emplace_back(name + "/", fnv1a64(digest_input));
  return corpus;
}

void write_text(const std::string& text, const std::string& path,
                std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw Error(ErrorCode::kIo, "cannot write " + path);
}

// Runs f(0..n-1) on up to `workers` threads. The lowest-index failure is
// rethrown so errors do not depend on scheduling.
void parallel_for(std::size_t n, unsigned workers,
                  const std::function<void(std::size_t)>& f) {
  std::vector<std::exception_ptr> errors(n);
  auto body = [&](std::atomic<std::size_t>& next) {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::atomic<std::size_t> next{0};
  if (workers <= 1 || n <= 1) {
    body(next);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < std::min<std::size_t>(workers, n); ++w) {
      pool.emplace_back([&] { body(next); });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

AttentionMaskSet to_mask(const Matrix& m) {
  AttentionMaskSet mask(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const double x = m(i, j);
      if (x != 0.0 && x != 1.0) {
        throw Error(ErrorCode::kMalformedLine,
                    "mask entries must be 0 or 1, got " + format_double(x));
      }
      mask(i, j) = x == 1.0 ? 1 : 0;
    }
  }
  return mask;
}

Matrix load_matrix(const std::string& path, Header& header) {
  std::istringstream in(load(path, header));
  return read_matrix(in);
}

std::map<Relation, double> parse_boosts(const std::vector<std::string>& raw) {
  std::map<Relation, double> boosts;
  for (const auto& b : raw) {
    const auto eq = b.find('=');
    if (eq == std::string::npos) {
      throw UsageError("--boost expects Relation=factor, got '" + b + "'");
    }
    const auto rel = parse_relation(std::string_view(b).substr(0, eq));
    if (!rel) throw UsageError("unknown relation in --boost '" + b + "'");
    try {
      boosts[*rel] = parse_double(std::string_view(b).substr(eq + 1));
    } catch (const Error&) {
      throw UsageError("bad factor in --boost '" + b + "'");
    }
  }
  return boosts;
}

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kInvalidConstraint:
      return kExitUsage;
    default:
      return kExitData;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"RST tree toolkit: validation, encoding, sampling, attention "
               "masks, tree edit distance, keyphrases and metrics.",
               "rstkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  std::string output;
  auto add_output = [&output](CLI::App* sub) {
    sub->add_option("-o,--output", output, "Write results here, not stdout");
  };

  // validate
  std::string v_tree;
  auto* validate_cmd =
      app.add_subcommand("validate", "Check a tree file's structure");
  validate_cmd->add_option("tree", v_tree, "Tree file")
      ->required()
      ->check(CLI::ExistingFile);
  add_output(validate_cmd);

  // encode
  std::string e_tree;
  auto* encode_cmd = app.add_subcommand(
      "encode", "Emit relation, nuclearity and path encodings of parents");
  encode_cmd->add_option("tree", e_tree, "Tree file")
      ->required()
      ->check(CLI::ExistingFile);
  add_output(encode_cmd);

  // fit
  std::string f_corpus;
  double f_alpha = kDefaultSmoothing;
  auto* fit_cmd =
      app.add_subcommand("fit", "Fit a conditional table from a corpus");
  fit_cmd->add_option("--corpus", f_corpus, "Directory of .tree files")
      ->required();
  fit_cmd->add_option("--alpha", f_alpha, "Additive smoothing constant")
      ->capture_default_str();
  add_output(fit_cmd);

  // sample
  std::string s_corpus;
  std::string s_table;
  std::optional<int> s_edus;
  std::uint64_t s_seed = 0;
  std::vector<std::string> s_boosts;
  int s_max_depth = kMaxTreeDepth;
  double s_alpha = kDefaultSmoothing;
  std::size_t s_count = 1;
  unsigned s_workers = 1;
  std::string s_out_dir;
  auto* sample_cmd = app.add_subcommand("sample", "Sample RST trees");
  auto* corpus_opt = sample_cmd->add_option(
      "--corpus", s_corpus, "Directory of .tree files to fit from");
  auto* table_opt =
      sample_cmd->add_option("--table", s_table, "Previously fitted table");
  corpus_opt->excludes(table_opt);
  sample_cmd->add_option("--edus", s_edus, "Exact number of EDUs (>= 2)");
  sample_cmd->add_option("--seed", s_seed, "RNG seed")->capture_default_str();
  sample_cmd->add_option("--boost", s_boosts,
                         "Relation=factor probability multiplier (repeatable)");
  sample_cmd->add_option("--max-depth", s_max_depth, "Maximum tree depth")
      ->capture_default_str();
  sample_cmd->add_option("--alpha", s_alpha, "Smoothing when fitting --corpus")
      ->capture_default_str();
  sample_cmd->add_option("--count", s_count, "Number of trees")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sample_cmd->add_option("--workers", s_workers, "Worker threads")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sample_cmd->add_option("--out-dir", s_out_dir,
                         "Directory for sample-NNNNN.tree (needed if count > 1)");
  add_output(sample_cmd);

  // assign
  std::string a_tree;
  std::string a_text;
  std::string a_lexicon;
  auto* assign_cmd = app.add_subcommand(
      "assign", "Split a whitespace-tokenized text over a tree's leaves");
  assign_cmd->add_option("tree", a_tree, "Tree file")
      ->required()
      ->check(CLI::ExistingFile);
  assign_cmd->add_option("text", a_text, "Text file")
      ->required()
      ->check(CLI::ExistingFile);
  assign_cmd->add_option("--lexicon", a_lexicon,
                         "Discourse marker lexicon, one word per line")
      ->check(CLI::ExistingFile);
  add_output(assign_cmd);

  // mask
  std::string m_tree;
  std::string m_assignment;
  std::string m_part = "full";
  auto* mask_cmd =
      app.add_subcommand("mask", "Build the RST-aware attention mask");
  mask_cmd->add_option("tree", m_tree, "Tree file")
      ->required()
      ->check(CLI::ExistingFile);
  mask_cmd->add_option("assignment", m_assignment, "Token assignment file")
      ->required()
      ->check(CLI::ExistingFile);
  mask_cmd->add_option("--part", m_part, "full, context or text")
      ->capture_default_str()
      ->check(CLI::IsMember({"full", "context", "text"}));
  add_output(mask_cmd);

  // attend
  std::string t_q, t_k, t_v, t_mask;
  bool t_weights = false;
  bool t_grad = false;
  auto* attend_cmd =
      app.add_subcommand("attend", "Masked scaled dot-product attention");
  attend_cmd->add_option("--queries", t_q, "n x d matrix")
      ->required()
      ->check(CLI::ExistingFile);
  attend_cmd->add_option("--keys", t_k, "m x d matrix")
      ->required()
      ->check(CLI::ExistingFile);
  attend_cmd->add_option("--values", t_v, "m x v matrix")
      ->required()
      ->check(CLI::ExistingFile);
  attend_cmd->add_option("--mask", t_mask, "n x m 0/1 matrix")
      ->required()
      ->check(CLI::ExistingFile);
  attend_cmd->add_flag("--weights", t_weights,
                       "Print attention weights instead of outputs");
  attend_cmd->add_flag("--grad-check", t_grad,
                       "Also run the finite-difference gradient check");
  add_output(attend_cmd);

  // ted
  std::string d_ref, d_hyp;
  std::string d_variant = "complete";
  bool d_script = false;
  auto* ted_cmd = app.add_subcommand("ted", "RST tree edit distance");
  ted_cmd->add_option("reference", d_ref, "Reference tree")
      ->required()
      ->check(CLI::ExistingFile);
  ted_cmd->add_option("hypothesis", d_hyp, "Hypothesis tree")
      ->required()
      ->check(CLI::ExistingFile);
  ted_cmd->add_option("--variant", d_variant, "simple, complex or complete")
      ->capture_default_str()
      ->check(CLI::IsMember({"simple", "complex", "complete"}));
  ted_cmd->add_flag("--script", d_script, "Also print the edit script");
  add_output(ted_cmd);

  // textrank
  std::string k_file;
  int k_window = kDefaultWindow;
  std::size_t k_top = 10;
  PageRankOptions k_opts;
  bool k_plain = false;
  auto* textrank_cmd =
      app.add_subcommand("textrank", "Rank keyphrases with TextRank");
  textrank_cmd->add_option("file", k_file, "Tagged-token file")
      ->required()
      ->check(CLI::ExistingFile);
  textrank_cmd->add_option("--window", k_window, "Co-occurrence window k")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  textrank_cmd->add_option("--top", k_top, "Phrases to keep (0 = all)")
      ->capture_default_str();
  textrank_cmd->add_option("--damping", k_opts.damping, "Damping factor")
      ->capture_default_str();
  textrank_cmd->add_option("--tol", k_opts.tolerance, "Convergence tolerance")
      ->capture_default_str();
  textrank_cmd->add_option("--max-iter", k_opts.max_iterations,
                           "Iteration limit")
      ->capture_default_str();
  textrank_cmd->add_flag("--plain", k_plain,
                         "Input is plain text; tag it with the fallback tagger");
  add_output(textrank_cmd);

  // metrics
  std::string x_hyp, x_ref, x_edus, x_merge;
  int x_distinct = 0, x_msj = 0, x_bleu = 0;
  unsigned x_workers = 1;
  auto* metrics_cmd =
      app.add_subcommand("metrics", "Corpus-level text metrics");
  metrics_cmd->add_option("--hyp", x_hyp, "Hypothesis corpus, one text/line")
      ->required()
      ->check(CLI::ExistingFile);
  metrics_cmd->add_option("--ref", x_ref, "Reference corpus, one text/line")
      ->check(CLI::ExistingFile);
  metrics_cmd->add_option("--distinct", x_distinct,
                          "Report distinct-1..N of the hypotheses")
      ->check(CLI::NonNegativeNumber);
  metrics_cmd->add_option("--msj", x_msj, "Report MS-Jaccard up to order N")
      ->check(CLI::NonNegativeNumber);
  metrics_cmd->add_option("--bleu", x_bleu, "Report BLEU of order N")
      ->check(CLI::NonNegativeNumber);
  metrics_cmd->add_option("--edu-counts", x_edus,
                          "EDU count per hypothesis line, for length stats")
      ->check(CLI::ExistingFile);
  metrics_cmd->add_option("--merge", x_merge,
                          "Precomputed metric<TAB>value rows to append")
      ->check(CLI::ExistingFile);
  metrics_cmd->add_option("--workers", x_workers, "Worker threads")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  add_output(metrics_cmd);

  // recall
  std::vector<std::string> r_trees;
  std::string r_bucket = "exact";
  auto* recall_cmd = app.add_subcommand(
      "recall", "Per-relation position recall over reference/hypothesis pairs");
  recall_cmd->add_option("trees", r_trees, "ref1 hyp1 [ref2 hyp2 ...]")
      ->required()
      ->check(CLI::ExistingFile);
  recall_cmd->add_option("--bucket", r_bucket,
                         "EDU-count banding: exact or range")
      ->capture_default_str()
      ->check(CLI::IsMember({"exact", "range"}));
  add_output(recall_cmd);

  std::vector<const char*> argv{"rstkit"};
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    std::ostringstream res;
    Header header;
    header.command = app.get_subcommands().front()->get_name();
    int status = kExitOk;

    if (*validate_cmd) {
      const RstTree tree = load_tree(v_tree, header);
      const ValidationReport report = validate(tree);
      res << header.str();
      if (report.ok()) {
        res << "OK\n";
      } else {
        for (const auto& v : report.violations) {
          res << "violation\t" << v.pos.index << '\t' << v.message << '\n';
        }
        status = kExitData;
      }
    } else if (*encode_cmd) {
      const EncodedTree enc = encode_tree(load_tree(e_tree, header));
      res << header.str() << "# pos\trelation_id\tnuclearity_id\tpath\n";
      for (std::size_t i = 0; i < enc.size(); ++i) {
        res << enc.positions[i].index << '\t' << enc.relation_ids[i] << '\t'
            << enc.nuclearity_ids[i] << '\t';
        for (std::size_t k = 0; k < enc.path_vectors[i].size(); ++k) {
          if (k) res << ',';
          res << format_double(enc.path_vectors[i][k]);
        }
        res << '\n';
      }
    } else if (*fit_cmd) {
      const auto corpus = load_corpus(f_corpus, header);
      std::ostringstream table;
      fit(corpus, f_alpha).save(table);
      // The table format requires its magic line first.
      const std::string t = table.str();
      const auto nl = t.find('\n') + 1;
      res << t.substr(0, nl) << header.str() << t.substr(nl);
    } else if (*sample_cmd) {
      if (s_corpus.empty() && s_table.empty()) {
        throw UsageError("sample needs --corpus or --table");
      }
      if (s_count > 1 && s_out_dir.empty()) {
        throw UsageError("--count > 1 needs --out-dir");
      }
      std::optional<ConditionalTable> table;
      if (!s_corpus.empty()) {
        table.emplace(fit(load_corpus(s_corpus, header), s_alpha));
      } else {
        std::istringstream in(load(s_table, header));
        table.emplace(ConditionalTable::load(in));
      }
      SamplerConstraints base;
      base.target_edu_count = s_edus;
      base.relation_boosts = parse_boosts(s_boosts);
      base.max_depth = s_max_depth;
      header.seed = s_seed;
      if (s_edus) header.extra.push_back("edus=" + std::to_string(*s_edus));
      std::vector<std::string> trees(s_count);
      parallel_for(s_count, s_workers, [&](std::size_t i) {
        SamplerConstraints c = base;
        c.seed = derive_seed(s_seed, i);
        Header h = header;
        h.extra.push_back("task=" + std::to_string(i));
        trees[i] = h.str() + serialize_tree(sample_tree(*table, c));
      });
      if (s_out_dir.empty()) {
        res << trees.front();
      } else {
        fs::create_directories(s_out_dir);
        for (std::size_t i = 0; i < trees.size(); ++i) {
          char name[32];
          std::snprintf(name, sizeof name, "sample-%05zu.tree", i);
          write_text(trees[i], (fs::path(s_out_dir) / name).string(), out);
        }
        res << header.str() << "wrote\t" << trees.size() << '\t' << s_out_dir
            << '\n';
      }
    } else if (*assign_cmd) {
      const RstTree tree = load_tree(a_tree, header);
      const auto tokens = split_whitespace(load(a_text, header));
      BoundaryRules rules;
      if (!a_lexicon.empty()) {
        std::istringstream in(load(a_lexicon, header));
        rules = BoundaryRules::from_lexicon(in);
      }
      const TokenAssignment a = assign_tokens(tree, tokens, rules);
      res << header.str();
      if (!a.unused_leaves.empty()) {
        res << "# unused leaves:";
        for (NodePos p : a.unused_leaves) res << ' ' << p.index;
        res << '\n';
      }
      write_assignment(a, res);
    } else if (*mask_cmd) {
      const RstTree tree = load_tree(m_tree, header);
      std::istringstream in(load(m_assignment, header));
      const TokenAssignment a = read_assignment(in);
      const ContextLayout layout = make_layout(tree);
      header.extra.push_back("text_start=" +
                             std::to_string(layout.text_start));
      res << header.str();
      if (m_part == "context") {
        write_mask(context_mask(tree, layout, a), res);
      } else if (m_part == "text") {
        write_mask(text_mask(a), res);
      } else {
        write_mask(full_mask(tree, layout, a), res);
      }
    } else if (*attend_cmd) {
      AttentionInputs inp;
      inp.queries = load_matrix(t_q, header);
      inp.keys = load_matrix(t_k, header);
      inp.values = load_matrix(t_v, header);
      inp.mask = to_mask(load_matrix(t_mask, header));
      const AttentionResult r = masked_attention(inp);
      res << header.str();
      write_matrix(t_weights ? r.weights : r.output, res);
      if (t_grad) {
        const GradientCheckReport g = gradient_check(inp);
        res << "# grad-check queries=" << format_double(g.queries)
            << " keys=" << format_double(g.keys)
            << " values=" << format_double(g.values)
            << " max=" << format_double(g.max_relative_error) << '\n';
      }
    } else if (*ted_cmd) {
      const RstTree ref = load_tree(d_ref, header);
      const RstTree hyp = load_tree(d_hyp, header);
      const TedReport r = ted(ref, hyp, *parse_variant(d_variant));
      header.extra.push_back("variant=" + d_variant);
      res << header.str() << r.raw_cost << '\t' << format_double(r.normalized)
          << '\n';
      if (d_script) write_script(r.script, res);
    } else if (*textrank_cmd) {
      const std::string text = load(k_file, header);
      TaggedDocument doc;
      if (k_plain) {
        doc.tokens = fallback_tag(text);
      } else {
        std::istringstream in(text);
        doc = read_tagged(in);
      }
      const auto spans =
          doc.spans.empty() ? fallback_candidates(doc.tokens) : doc.spans;
      const WordGraph graph = build_graph(doc.tokens, k_window);
      const PageRankResult ranks = pagerank(graph, k_opts);
      const auto ranked = rank_candidates(
          score_candidates(doc.tokens, spans, graph, ranks), k_top);
      res << header.str() << "# nodes=" << graph.size()
          << " edges=" << graph.edge_count()
          << " iterations=" << ranks.iterations
          << " converged=" << (ranks.converged ? "true" : "false") << '\n';
      if (!ranks.converged) {
        err << "rstkit: warning: PageRank did not converge in "
            << ranks.iterations << " iterations\n";
      }
      for (std::size_t i = 0; i < ranked.size(); ++i) {
        res << i + 1 << '\t' << format_double(ranked[i].score) << '\t'
            << ranked[i].phrase << '\n';
      }
    } else if (*metrics_cmd) {
      std::istringstream hin(load(x_hyp, header));
      const Corpus hyp = read_corpus(hin);
      Corpus ref;
      if (!x_ref.empty()) {
        std::istringstream rin(load(x_ref, header));
        ref = read_corpus(rin);
      } else if (x_msj > 0 || x_bleu > 0) {
        throw UsageError("--msj and --bleu need --ref");
      }
      std::vector<std::function<std::string()>> tasks;
      for (int n = 1; n <= x_distinct; ++n) {
        tasks.emplace_back([&hyp, n] {
          return "distinct-" + std::to_string(n) + "\t" +
                 format_double(distinct_n(hyp, n)) + "\n";
        });
      }
      if (x_msj > 0) {
        tasks.emplace_back([&] {
          return "ms-jaccard-" + std::to_string(x_msj) + "\t" +
                 format_double(ms_jaccard(hyp, ref, x_msj)) + "\n";
        });
      }
      if (x_bleu > 0) {
        tasks.emplace_back([&] {
          return "bleu-" + std::to_string(x_bleu) + "\t" +
                 format_double(bleu_n(hyp, ref, x_bleu)) + "\n";
        });
      }
      if (!x_edus.empty()) {
        const auto fields = split_whitespace(load(x_edus, header));
        std::vector<int> counts;
        for (const auto& f : fields) {
          const double v = parse_double(f);
          if (v != static_cast<int>(v)) {
            throw Error(ErrorCode::kMalformedLine, "bad EDU count " + f);
          }
          counts.push_back(static_cast<int>(v));
        }
        tasks.emplace_back([&hyp, counts] {
          std::string s;
          for (const auto& [edus, st] : length_stats(hyp, counts)) {
            s += "length\t" + std::to_string(edus) + "\t" +
                 std::to_string(st.texts) + "\t" +
                 format_double(st.mean_words) + "\t" +
                 format_double(st.mean_sentences) + "\n";
          }
          return s;
        });
      }
      if (!x_merge.empty()) {
        std::string merged;
        std::istringstream min(load(x_merge, header));
        std::string line;
        while (std::getline(min, line)) {
          if (line.empty() || line.front() == '#') continue;
          const auto tab = line.find('\t');
          if (tab == std::string::npos) {
            throw Error(ErrorCode::kMalformedLine,
                        "merge rows are metric<TAB>value: " + line);
          }
          merged += line.substr(0, tab) + "\t" +
                    format_double(parse_double(line.substr(tab + 1))) + "\n";
        }
        tasks.emplace_back([merged] { return merged; });
      }
      std::vector<std::string> rows(tasks.size());
      parallel_for(tasks.size(), x_workers,
                   [&](std::size_t i) { rows[i] = tasks[i](); });
      res << header.str();
      for (const auto& r : rows) res << r;
    } else if (*recall_cmd) {
      if (r_trees.size() % 2 != 0) {
        throw UsageError("recall takes reference/hypothesis pairs");
      }
      RecallAccumulator acc(r_bucket == "range" ? BucketMode::kRange
                                                : BucketMode::kExact);
      RecallTable all;
      for (std::size_t i = 0; i < r_trees.size(); i += 2) {
        const RstTree ref = load_tree(r_trees[i], header);
        const RstTree hyp = load_tree(r_trees[i + 1], header);
        all.merge(relation_recall(ref, hyp));
        acc.add(ref, hyp);
      }
      header.extra.push_back("bucket=" + r_bucket);
      res << header.str()
          << "# bucket\trelation\tmatched\treference\trecall\n";
      auto emit = [&res](const std::string& bucket, const RecallTable& t) {
        for (const auto& [rel, row] : t.rows) {
          res << bucket << '\t' << to_string(rel) << '\t' << row.matched
              << '\t' << row.reference << '\t' << format_double(row.recall())
              << '\n';
        }
      };
      emit("all", all);
      for (const auto& [band, t] : acc.buckets()) {
        emit(std::to_string(band), t);
      }
    }

    write_text(res.str(), output, out);
    return status;
  } catch (const UsageError& e) {
    err << "rstkit: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "rstkit: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "rstkit: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace rstkit
