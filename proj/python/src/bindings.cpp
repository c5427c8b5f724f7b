#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "optstop/cart.hpp"
#include "optstop/config.hpp"
#include "optstop/ensemble.hpp"
#include "optstop/error.hpp"
#include "optstop/experiment.hpp"
#include "optstop/hash.hpp"
#include "optstop/reward.hpp"
#include "optstop/stopper.hpp"
#include "optstop/valuation.hpp"

namespace py = pybind11;
using namespace optstop;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

ExperimentConfig config_from(const py::dict& fields) {
  ExperimentConfig c;
  for (const auto& [key, value] : fields) {
    c.set(py::str(key).cast<std::string>(), py::str(value).cast<std::string>());
  }
  return c;
}

py::dict config_to_dict(const ExperimentConfig& c) {
  py::dict out;
  std::istringstream in(c.serialize());
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    out[py::str(line.substr(0, eq))] = line.substr(eq + 3);
  }
  return out;
}

Array ensemble_array(const PathEnsemble& p) {
  Array out({p.num_paths(), p.num_steps() + 1, p.dim()});
  std::copy(p.raw().begin(), p.raw().end(), out.mutable_data());
  return out;
}

PathEnsemble ensemble_from(const Array& a, bool indicator) {
  if (a.ndim() != 3) throw DimensionError("paths must have shape (K, N+1, D)");
  const auto K = static_cast<std::size_t>(a.shape(0));
  const auto N1 = static_cast<std::size_t>(a.shape(1));
  const auto D = static_cast<std::size_t>(a.shape(2));
  if (N1 < 2) throw DimensionError("paths need at least two time points");
  std::vector<double> data(a.data(), a.data() + a.size());
  return PathEnsemble(K, N1 - 1, D, std::move(data), 0, EnsembleLabel::test, indicator);
}

py::dict report_dict(const ValuationReport& r) {
  py::dict d;
  d["kind"] = std::string(to_string(r.kind));
  d["value"] = r.value;
  d["se"] = r.std_error;
  d["paths"] = r.count;
  d["seed"] = r.seed;
  d["stopper_hash"] = r.stopper_hash ? hex64(r.stopper_hash) : std::string{};
  return d;
}

SampleSet samples_from(const Array& points, const Array& deltas) {
  if (points.ndim() != 2 || deltas.ndim() != 1 || points.shape(0) != deltas.shape(0)) {
    throw DimensionError("points must be (P, d) and deltas (P,)");
  }
  const auto dim = static_cast<std::size_t>(points.shape(1));
  return removal(std::span<const double>(points.data(), points.size()), dim,
                 std::span<const double>(deltas.data(), deltas.size()));
}

}  // namespace

PYBIND11_MODULE(_optstop, m) {
  m.doc() = "Optimal stopping with bagged Delta-split trees";

  // Translators are tried newest first, so the base class goes first.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<UnsupportedError>(m, "UnsupportedError", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);

  m.def("config_keys", &config_keys);
  m.def(
      "resolve_config",
      [](const py::dict& fields) {
        const auto c = config_from(fields);
        c.validate();
        return config_to_dict(c);
      },
      py::arg("fields") = py::dict(), "Defaults merged with `fields`, validated.");
  m.def(
      "config_hash", [](const py::dict& fields) { return hex64(config_from(fields).hash()); },
      py::arg("fields") = py::dict());

  m.def(
      "simulate",
      [](const py::dict& fields, const std::string& label) {
        const auto c = config_from(fields);
        c.validate();
        return ensemble_array(make_ensemble(c, parse_ensemble_label(label)));
      },
      py::arg("fields") = py::dict(), py::arg("label") = "training",
      "Simulated ensemble as an array of shape (K, N+1, D).");

  m.def(
      "reward",
      [](const std::string& kind, std::size_t n, const std::vector<double>& x, double rate,
         double strike, double maturity, std::size_t steps, double barrier) {
        RewardSpec s{parse_reward_kind(kind), rate, strike, maturity, steps, barrier};
        s.validate();
        return reward(s, n, x);
      },
      py::arg("kind"), py::arg("n"), py::arg("x"), py::arg("rate") = 0.05,
      py::arg("strike") = 100.0, py::arg("maturity") = 1.0, py::arg("steps") = 50,
      py::arg("barrier") = 0.0);

  m.def(
      "delta_split",
      [](const Array& points, const Array& deltas, const std::string& splitter) {
        const auto s = samples_from(points, deltas);
        const auto d = parse_splitter(splitter) == Splitter::delta ? delta_split(s)
                                                                   : prototype_split(s);
        py::dict out;
        out["is_leaf"] = d.is_leaf;
        if (d.is_leaf) {
          out["weight"] = d.weight;
        } else {
          out["dim"] = d.dim;
          out["threshold"] = d.threshold;
        }
        out["score"] = d.score;
        out["total"] = d.total;
        return out;
      },
      py::arg("points"), py::arg("deltas"), py::arg("splitter") = "delta");

  py::class_<CartTree>(m, "Tree")
      .def_property_readonly("depth", &CartTree::depth)
      .def_property_readonly("leaf_count", &CartTree::leaf_count)
      .def_property_readonly("node_count", &CartTree::node_count)
      .def("predict",
           [](const CartTree& t, const std::vector<double>& x) { return t.predict(x); })
      .def("dump", [](const CartTree& t) {
        std::ostringstream out;
        t.write(out);
        return out.str();
      });

  m.def(
      "grow",
      [](const Array& points, const Array& deltas, std::size_t max_depth,
         std::size_t min_node_size, const std::string& splitter) {
        GrowConfig cfg{max_depth, min_node_size, parse_splitter(splitter)};
        return grow(samples_from(points, deltas), cfg);
      },
      py::arg("points"), py::arg("deltas"), py::arg("max_depth") = 10,
      py::arg("min_node_size") = 10, py::arg("splitter") = "delta");

  m.def(
      "run_experiment",
      [](const py::dict& fields, bool write) {
        const auto c = config_from(fields);
        ExperimentResult r = [&] {
          py::gil_scoped_release release;
          return run_experiment(c);
        }();
        py::dict out;
        py::list reports;
        for (const auto& v : r.reports) reports.append(report_dict(v));
        out["reports"] = reports;
        out["config_hash"] = hex64(c.hash());
        out["stopper_hash"] = hex64(r.stopper.hash());
        if (r.boundary) {
          py::list means;
          for (const auto& v : r.boundary->mean) means.append(v ? py::cast(*v) : py::none());
          out["boundary_mean"] = means;
          out["boundary_count"] = r.boundary->count;
        }
        if (write) {
          std::vector<std::string> files;
          for (const auto& f : write_artifacts(r, c.out)) files.push_back(f.string());
          out["files"] = files;
        }
        return out;
      },
      py::arg("fields") = py::dict(), py::arg("write") = false,
      "Train and value one experiment; with write=True also write its artifacts.");

  m.def(
      "oracle",
      [](const Array& paths, const py::dict& fields, bool brute_force) {
        const auto c = config_from(fields);
        const auto p =
            ensemble_from(paths, c.model == RewardKind::max_call_barrier);
        const auto spec = c.reward_spec();
        return report_dict(brute_force ? oracle_brute_force(p, spec) : oracle_enumerate(p, spec));
      },
      py::arg("paths"), py::arg("fields") = py::dict(), py::arg("brute_force") = false,
      "Exact optimum over Markov rules on a small discrete ensemble.");

  m.def(
      "v_max",
      [](const Array& paths, const py::dict& fields) {
        const auto c = config_from(fields);
        return report_dict(
            v_max(ensemble_from(paths, c.model == RewardKind::max_call_barrier), c.reward_spec()));
      },
      py::arg("paths"), py::arg("fields") = py::dict());

  m.def("european_put_price", &european_put_price, py::arg("x0"), py::arg("strike"),
        py::arg("rate"), py::arg("drift"), py::arg("sigma"), py::arg("maturity"));
  m.def("european_call_price", &european_call_price, py::arg("x0"), py::arg("strike"),
        py::arg("rate"), py::arg("drift"), py::arg("sigma"), py::arg("maturity"));
}
