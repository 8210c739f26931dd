// Command line front end: encode, query, verify, stats, gen.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "flatlabel.hpp"

namespace fl = flatlabel;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_negative = 1;
constexpr int exit_usage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

fl::TreeDecomposition decomposition_for(const fl::Graph& g, const std::string& path, std::optional<int> hint) {
  if (path.empty()) return fl::decompose(g, hint);
  fl::TreeDecomposition td = fl::read_decomposition(path);
  auto report = fl::validate_decomposition(g, td);
  if (!report.ok) throw UsageError("decomposition " + path + ": " + report.summary());
  return td;
}

struct EncodeArgs {
  std::string scheme = "flat";
  std::string graph, embedding, decomposition, q_file, out;
  bool compress = false;
  bool baseline = false;
  std::optional<int> w_hint;
};

int run_encode(const EncodeArgs& a) {
  fl::SchemeKind kind = fl::parse_scheme(a.scheme);
  if (kind != fl::SchemeKind::tw && a.embedding.empty())
    throw UsageError("--embedding is required for the " + a.scheme + " scheme");
  fl::Graph g = fl::read_graph(a.graph);
  fl::VertexSet q = a.q_file.empty() ? fl::VertexSet{} : fl::read_vertex_set(a.q_file);
  q.check_bounds(g.size());

  auto start = std::chrono::steady_clock::now();
  fl::LabelArchive archive;
  if (kind == fl::SchemeKind::tw) {
    fl::TreeDecomposition td = decomposition_for(g, a.decomposition, a.w_hint);
    start = std::chrono::steady_clock::now();
    archive = fl::LabelArchive::from(fl::tw_encode(g, td, q));
  } else {
    fl::ProductEmbedding e = fl::read_embedding(a.embedding);
    auto report = fl::validate_embedding(g, e);
    if (!report.ok) throw UsageError("embedding " + a.embedding + ": " + report.summary());
    fl::TreeDecomposition td = decomposition_for(e.host, a.decomposition, a.w_hint);
    start = std::chrono::steady_clock::now();
    if (kind == fl::SchemeKind::product) {
      archive = fl::LabelArchive::from(fl::product_encode(g, e, td, q, a.compress));
    } else {
      fl::FlatOptions opts;
      if (a.baseline) opts = {false, false};
      archive = fl::LabelArchive::from(fl::flat_encode(g, e, td, opts));
    }
  }
  double ms = elapsed_ms(start);
  archive.save(a.out);
  std::cout << "n=" << archive.size() << " scheme=" << fl::to_string(archive.kind())
            << (archive.fallback() ? " (product fallback)" : "") << " max_bits=" << archive.labels().max_bits()
            << " mean_bits=" << archive.labels().mean_bits() << " encode_ms=" << ms << "\n";
  return exit_ok;
}

int run_query(const std::string& path, std::int64_t u, std::int64_t v) {
  fl::LabelArchive archive = fl::LabelArchive::load(path);
  auto n = static_cast<std::int64_t>(archive.size());
  if (u < 0 || v < 0 || u >= n || v >= n) throw UsageError("vertex out of range [0, " + std::to_string(n) + ")");
  if (u == v) throw UsageError("query needs two distinct vertices");
  bool adj = archive.adjacent(archive.label(static_cast<std::size_t>(u)), archive.label(static_cast<std::size_t>(v)));
  std::cout << (adj ? "adjacent" : "not-adjacent") << "\n";
  return adj ? exit_ok : exit_negative;
}

struct Mismatch {
  fl::Vertex u, v;
  bool expected;
};

// Checks pairs in parallel; a label that fails to decode counts as a mismatch.
std::vector<Mismatch> check_pairs(const fl::LabelArchive& archive, const fl::Graph& g,
                                  const std::vector<std::pair<fl::Vertex, fl::Vertex>>& pairs) {
  unsigned workers = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
  std::vector<std::vector<Mismatch>> found(workers);
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < workers; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < pairs.size(); i += workers) {
          auto [u, v] = pairs[i];
          bool want = g.adjacent(u, v);
          bool ok = false;
          try {
            ok = archive.adjacent(archive.label(u), archive.label(v)) == want;
          } catch (const std::exception&) {
          }
          if (!ok) found[t].push_back({u, v, want});
        }
      });
    }
  }
  std::vector<Mismatch> all;
  for (const auto& f : found) all.insert(all.end(), f.begin(), f.end());
  std::sort(all.begin(), all.end(), [](const Mismatch& a, const Mismatch& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  return all;
}

constexpr std::size_t all_pairs_limit = 5000;
constexpr std::size_t sampled_pairs = 1000000;

int run_verify(const std::string& path, const std::string& graph_path, std::uint64_t seed) {
  fl::LabelArchive archive = fl::LabelArchive::load(path);
  fl::Graph g = fl::read_graph(graph_path);
  if (g.size() != archive.size())
    throw UsageError("archive has " + std::to_string(archive.size()) + " labels but graph has " +
                     std::to_string(g.size()) + " vertices");
  const std::size_t n = g.size();
  std::vector<std::pair<fl::Vertex, fl::Vertex>> pairs;
  bool sampled = n > all_pairs_limit;
  if (!sampled) {
    pairs.reserve(n * (n - (n > 0)) / 2);
    for (fl::Vertex u = 0; u < n; ++u)
      for (fl::Vertex v = u + 1; v < n; ++v) pairs.emplace_back(u, v);
  } else {
    fl::Rng rng(seed);
    for (auto e : g.edges()) pairs.push_back(e);
    while (pairs.size() < g.edge_count() + sampled_pairs) {
      auto u = static_cast<fl::Vertex>(rng.below(n));
      auto v = static_cast<fl::Vertex>(rng.below(n));
      if (u != v) pairs.emplace_back(u, v);
    }
  }
  auto bad = check_pairs(archive, g, pairs);
  std::cout << "pairs_checked=" << pairs.size() << (sampled ? " (sampled)" : " (all)") << " mismatches=" << bad.size()
            << "\n";
  for (std::size_t i = 0; i < std::min<std::size_t>(bad.size(), 10); ++i)
    std::cout << "  mismatch " << bad[i].u << " " << bad[i].v << ": expected "
              << (bad[i].expected ? "adjacent" : "not-adjacent") << "\n";
  return bad.empty() ? exit_ok : exit_negative;
}

std::vector<std::size_t> parse_sweep(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto dots = item.find("..");
    try {
      if (dots == std::string::npos) {
        out.push_back(std::stoull(item));
      } else {
        // lo..hi doubles from lo up to hi
        std::size_t lo = std::stoull(item.substr(0, dots)), hi = std::stoull(item.substr(dots + 2));
        if (lo == 0) throw UsageError("sweep range must start above 0");
        for (std::size_t n = lo; n <= hi; n *= 2) out.push_back(n);
      }
    } catch (const std::logic_error&) {
      throw UsageError("bad sweep item: " + item);
    }
  }
  if (out.empty()) throw UsageError("empty sweep");
  return out;
}

struct StatsArgs {
  std::string sweep = "256..65536";
  std::string scheme = "flat";
  std::size_t w = 3;
  std::uint64_t seed = 1;
  int repeats = 3;
  std::string out;
};

int run_stats(const StatsArgs& a) {
  fl::SchemeKind kind = fl::parse_scheme(a.scheme);
  if (a.repeats < 1) throw UsageError("--repeats must be positive");
  std::ostringstream csv;
  csv << "scheme,n,w,d,max_bits,mean_bits,ratio,bound,baseline_max_bits,baseline_ratio,encode_ms,time_ratio\n";
  double prev_ms = 0;
  std::size_t prev_n = 0;
  for (std::size_t n : parse_sweep(a.sweep)) {
    fl::ProductInstance inst = fl::gen_sized_instance(a.seed + n, n, a.w);
    std::vector<double> times;
    fl::LabelArchive archive;
    std::optional<fl::LabelArchive> baseline;
    for (int r = 0; r < a.repeats; ++r) {
      auto start = std::chrono::steady_clock::now();
      if (kind == fl::SchemeKind::tw)
        archive = fl::LabelArchive::from(fl::tw_encode(inst.graph, fl::decompose(inst.graph)));
      else if (kind == fl::SchemeKind::product)
        archive = fl::LabelArchive::from(
            fl::product_encode(inst.graph, inst.embedding, inst.host_decomposition, {}, true));
      else
        archive = fl::LabelArchive::from(fl::flat_encode(inst.graph, inst.embedding, inst.host_decomposition));
      times.push_back(elapsed_ms(start));
    }
    if (kind == fl::SchemeKind::flat)
      baseline = fl::LabelArchive::from(
          fl::flat_encode(inst.graph, inst.embedding, inst.host_decomposition, {false, false}));
    std::sort(times.begin(), times.end());
    double ms = times[times.size() / 2];
    const std::size_t real_n = inst.graph.size();
    const double lg = std::log2(static_cast<double>(std::max<std::size_t>(real_n, 2)));
    const std::size_t max_bits = archive.labels().max_bits();
    double bound = kind == fl::SchemeKind::flat      ? fl::flat_length_bound(real_n, a.w)
                   : kind == fl::SchemeKind::product ? fl::product_length_bound(real_n, archive.d(), a.w)
                                                     : fl::tw_length_bound(real_n, archive.w());
    csv << a.scheme << ',' << real_n << ',' << archive.w() << ',' << archive.d() << ',' << max_bits << ','
        << archive.labels().mean_bits() << ',' << static_cast<double>(max_bits) / lg << ',' << bound << ',';
    if (baseline)
      csv << baseline->labels().max_bits() << ',' << static_cast<double>(baseline->labels().max_bits()) / lg;
    else
      csv << ',';
    csv << ',' << ms << ',';
    if (prev_n != 0 && real_n == 2 * prev_n && prev_ms > 0) csv << ms / prev_ms;
    csv << '\n';
    prev_ms = ms;
    prev_n = real_n;
  }
  if (a.out.empty()) std::cout << csv.str();
  else fl::write_file(a.out, csv.str());
  return exit_ok;
}

struct GenArgs {
  std::string kind = "product";
  std::uint64_t seed = 1;
  std::size_t n = 100;
  std::size_t w = 2;
  std::uint32_t d = 9;
  double keep = 0.8;
  double vertex_prob = 0.5;
  std::string out;
};

int run_gen(const GenArgs& a) {
  if (a.out.empty()) throw UsageError("--out prefix is required");
  std::string written;
  if (a.kind == "ktree") {
    fl::KTreeInstance kt = fl::gen_ktree(a.seed, a.n, a.w, a.keep);
    fl::write_file(a.out + ".graph", fl::graph_to_text(kt.graph));
    fl::write_file(a.out + ".td.json", fl::decomposition_to_json(kt.decomposition).dump() + "\n");
    written = a.out + ".graph " + a.out + ".td.json";
  } else {
    fl::ProductInstance inst;
    if (a.kind == "product") inst = fl::gen_product_instance(a.seed, a.n, a.w, a.d, a.keep, a.vertex_prob);
    else if (a.kind == "sized") inst = fl::gen_sized_instance(a.seed, a.n, a.w, a.keep);
    else inst = fl::gen_adversarial(a.kind, a.seed, a.n, a.w);
    fl::write_file(a.out + ".graph", fl::graph_to_text(inst.graph));
    fl::write_file(a.out + ".embedding.json", fl::embedding_to_json(inst.embedding).dump() + "\n");
    fl::write_file(a.out + ".td.json", fl::decomposition_to_json(inst.host_decomposition).dump() + "\n");
    written = a.out + ".graph " + a.out + ".embedding.json " + a.out + ".td.json";
  }
  std::cout << "wrote " << written << "\n";
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adjacency labels for subgraphs of H x P"};
  app.require_subcommand(1);

  EncodeArgs enc;
  auto* encode = app.add_subcommand("encode", "Encode a graph into a label archive");
  encode->add_option("--scheme", enc.scheme, "tw, product or flat")
      ->check(CLI::IsMember({"tw", "product", "flat"}))
      ->capture_default_str();
  encode->add_option("--graph", enc.graph, "Graph file (text or JSON)")->required()->check(CLI::ExistingFile);
  encode->add_option("--embedding", enc.embedding, "Embedding JSON")->check(CLI::ExistingFile);
  encode->add_option("--decomposition", enc.decomposition, "Decomposition JSON (of the host for product/flat)")
      ->check(CLI::ExistingFile);
  encode->add_option("--q-file", enc.q_file, "Vertices that get short labels (tw, product)")
      ->check(CLI::ExistingFile);
  encode->add_option("--w-hint", enc.w_hint, "Width target when computing a decomposition");
  encode->add_flag("--compress-endpoints", enc.compress, "Tagged path coordinates (product)");
  encode->add_flag("--baseline", enc.baseline, "Flat scheme without the short-label savings");
  encode->add_option("--out", enc.out, "Archive file")->required();

  std::string query_archive;
  std::int64_t qu = 0, qv = 0;
  auto* query = app.add_subcommand("query", "Decide adjacency of two vertices from their labels");
  query->add_option("archive", query_archive)->required()->check(CLI::ExistingFile);
  query->add_option("u", qu)->required();
  query->add_option("v", qv)->required();

  std::string verify_archive, verify_graph;
  std::uint64_t verify_seed = 1;
  auto* verify = app.add_subcommand("verify", "Compare every decodable pair against the source graph");
  verify->add_option("archive", verify_archive)->required()->check(CLI::ExistingFile);
  verify->add_option("--graph", verify_graph)->required()->check(CLI::ExistingFile);
  verify->add_option("--seed", verify_seed, "Seed for sampled pairs on large graphs")->capture_default_str();

  StatsArgs st;
  auto* stats = app.add_subcommand("stats", "Label length and encode time over a size sweep (CSV)");
  stats->add_option("--sweep", st.sweep, "Comma list of n, or lo..hi doubling")->capture_default_str();
  stats->add_option("--scheme", st.scheme)->check(CLI::IsMember({"tw", "product", "flat"}))->capture_default_str();
  stats->add_option("--w", st.w, "Host width")->capture_default_str();
  stats->add_option("--seed", st.seed)->capture_default_str();
  stats->add_option("--repeats", st.repeats, "Timing repetitions (median reported)")->capture_default_str();
  stats->add_option("--out", st.out, "CSV file (stdout when omitted)");

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate an instance");
  std::vector<std::string> kinds = {"ktree", "product", "sized"};
  kinds.insert(kinds.end(), fl::adversarial_kinds().begin(), fl::adversarial_kinds().end());
  gen_cmd->add_option("--kind", gen.kind)->check(CLI::IsMember(kinds))->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed)->capture_default_str();
  gen_cmd->add_option("--n", gen.n, "Vertices (host vertices for product)")->capture_default_str();
  gen_cmd->add_option("--w", gen.w, "Width")->capture_default_str();
  gen_cmd->add_option("--d", gen.d, "Path length (product)")->capture_default_str();
  gen_cmd->add_option("--keep", gen.keep, "Edge keep probability")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  gen_cmd->add_option("--vertex-prob", gen.vertex_prob, "Cell use probability (product)")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output path prefix")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    if (*encode) return run_encode(enc);
    if (*query) return run_query(query_archive, qu, qv);
    if (*verify) return run_verify(verify_archive, verify_graph, verify_seed);
    if (*stats) return run_stats(st);
    if (*gen_cmd) return run_gen(gen);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  }
  return exit_usage;
}
