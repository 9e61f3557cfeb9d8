#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "clustermerge/alignment.hpp"
#include "clustermerge/evaluation.hpp"
#include "clustermerge/shared_runtime.hpp"
#include "clustermerge/synthetic.hpp"

namespace py = pybind11;
using namespace clustermerge;

namespace {

struct Scoring {
  int similarity = 181;
  int full_merge = 250;
  int max_uncovered = 15;
  int gap_open = 37;
  int gap_extend = 7;

  AlignmentParams params() const {
    AlignmentParams p;
    p.gap_open = gap_open;
    p.gap_extend = gap_extend;
    p.validate();
    return p;
  }
  Thresholds thresholds() const {
    Thresholds th{similarity, full_merge, max_uncovered};
    th.validate();
    return th;
  }
};

using PyCluster = std::pair<SeqIndex, std::vector<SeqIndex>>;
using PyPair = std::tuple<SeqIndex, SeqIndex, int>;

std::vector<PyCluster> to_py(const ClusterSet& set) {
  std::vector<PyCluster> out;
  for (const auto& c : set.clusters) out.emplace_back(c.representative, std::vector<SeqIndex>(c.members.begin(), c.members.end()));
  return out;
}

ClusterSet from_py(const std::vector<PyCluster>& clusters, const SequenceStore& store) {
  ClusterSet set;
  for (const auto& [rep, members] : clusters) {
    store.get(rep);
    Cluster c(rep, 0);
    for (SeqIndex m : members) {
      store.get(m);
      c.members.insert(m);
    }
    set.clusters.push_back(std::move(c));
  }
  return set;
}

std::vector<PyPair> pairs_to_py(const PairSet& pairs) {
  std::vector<PyPair> out;
  for (const auto& p : pairs.pairs()) out.emplace_back(p.i, p.j, p.score);
  return out;
}

PairSet pairs_from_py(const std::vector<PyPair>& pairs) {
  std::vector<ScoredPair> v;
  for (const auto& [i, j, s] : pairs) v.push_back({i, j, s});
  return PairSet(std::move(v), RunMetadata{});
}

}  // namespace

PYBIND11_MODULE(_clustermerge, m) {
  m.doc() = "Precise protein sequence clustering by bottom-up cluster merging";
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);

  py::class_<Scoring>(m, "Scoring")
      .def(py::init<>())
      .def_readwrite("similarity", &Scoring::similarity)
      .def_readwrite("full_merge", &Scoring::full_merge)
      .def_readwrite("max_uncovered", &Scoring::max_uncovered)
      .def_readwrite("gap_open", &Scoring::gap_open)
      .def_readwrite("gap_extend", &Scoring::gap_extend);

  py::class_<SequenceStore>(m, "SequenceStore")
      .def_static("from_records", &SequenceStore::from_records, py::arg("records"))
      .def_static("from_fasta", [](const std::string& path) { return load_fasta(path); }, py::arg("path"))
      .def("__len__", &SequenceStore::size)
      .def("id", [](const SequenceStore& s, SeqIndex i) { return s.get(i).id; })
      .def("residues", [](const SequenceStore& s, SeqIndex i) { return s.get(i).residues; })
      .def_property_readonly("checksum", &SequenceStore::checksum);

  m.def("align", [](const std::string& a, const std::string& b, const Scoring& scoring) {
        const auto store = SequenceStore::from_records({{"a", a}, {"b", b}});
        const auto r = sw_align(store[0], store[1], scoring.params());
        return py::make_tuple(r.score, py::make_tuple(r.span_a.begin, r.span_a.end),
                              py::make_tuple(r.span_b.begin, r.span_b.end));
      },
      py::arg("a"), py::arg("b"), py::arg("scoring") = Scoring{},
      "Local alignment: (score, (a_begin, a_end), (b_begin, b_end)), half-open spans.");

  m.def("cluster", [](const SequenceStore& store, unsigned threads, std::uint64_t granularity, const Scoring& scoring) {
        SharedOptions options;
        options.threads = threads;
        options.granularity = granularity;
        const auto params = scoring.params();
        const auto th = scoring.thresholds();
        ClusterSet result;
        {
          py::gil_scoped_release release;
          result = cluster(store, params, th, options);
        }
        return to_py(result);
      },
      py::arg("store"), py::arg("threads") = 1, py::arg("granularity") = kDefaultGranularity,
      py::arg("scoring") = Scoring{}, "Clusters every sequence; returns [(representative, members)].");

  m.def("brute_force_pairs", [](const SequenceStore& store, unsigned threads, const Scoring& scoring) {
        const auto params = scoring.params();
        const auto th = scoring.thresholds();
        py::gil_scoped_release release;
        return pairs_to_py(brute_force_pairs(store, params, th, threads));
      },
      py::arg("store"), py::arg("threads") = 1, py::arg("scoring") = Scoring{});

  m.def("extract_pairs", [](const SequenceStore& store, const std::vector<PyCluster>& clusters, unsigned threads,
                            const Scoring& scoring) {
        const auto set = from_py(clusters, store);
        const auto params = scoring.params();
        const auto th = scoring.thresholds();
        py::gil_scoped_release release;
        return pairs_to_py(extract_pairs(set, store, params, th, threads));
      },
      py::arg("store"), py::arg("clusters"), py::arg("threads") = 1, py::arg("scoring") = Scoring{});

  m.def("recall", [](const std::vector<PyPair>& truth, const std::vector<PyPair>& found) {
        const auto report = recall_report(pairs_from_py(truth), pairs_from_py(found));
        return py::module_::import("json").attr("loads")(report.to_json().dump());
      },
      py::arg("truth"), py::arg("found"), "Recall report as a dict.");

  m.def("cluster_stats", [](const SequenceStore& store, const std::vector<PyCluster>& clusters) {
        const auto stats = cluster_stats(from_py(clusters, store));
        return py::module_::import("json").attr("loads")(stats.to_json().dump());
      },
      py::arg("store"), py::arg("clusters"));

  m.def("planted_families", [](std::size_t families, std::size_t copies, std::uint64_t seed, double min_rate,
                               double max_rate) {
        PlantedFamilyConfig cfg;
        cfg.families = families;
        cfg.copies = copies;
        cfg.seed = seed;
        cfg.min_rate = min_rate;
        cfg.max_rate = max_rate;
        return generate_planted_families(cfg);
      },
      py::arg("families") = 100, py::arg("copies") = 10, py::arg("seed") = 1, py::arg("min_rate") = 0.05,
      py::arg("max_rate") = 0.15, "Synthetic [(id, residues)] records of mutated family copies.");
}
