#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "wnn/data.hpp"
#include "wnn/eval.hpp"
#include "wnn/pipeline.hpp"

namespace py = pybind11;
using namespace wnn;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::span<const double> view(const Array& a) {
  if (a.ndim() != 1) throw Error(ErrorCode::InvalidArgument, "expected a 1-D array");
  return {a.data(), static_cast<std::size_t>(a.size())};
}

Array to_array(const std::vector<double>& v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

EegClass class_from(const py::handle& h) {
  const auto name = py::cast<std::string>(h);
  const auto c = parse_class(name);
  if (!c) throw Error(ErrorCode::InvalidArgument, "unknown class '" + name + "'");
  return *c;
}

py::dict segment_dict(const Segment& s) {
  py::dict d;
  d["id"] = s.id;
  d["set"] = std::string(1, to_char(s.set));
  d["label"] = std::string(to_string(s.label()));
  d["samples"] = to_array(std::vector<double>(s.signal.samples().begin(), s.signal.samples().end()));
  return d;
}

std::vector<FeatureVector> feature_list(const Eigen::MatrixXd& features, const py::sequence& labels) {
  if (features.cols() != static_cast<Eigen::Index>(kFeatureCount) ||
      features.rows() != static_cast<Eigen::Index>(py::len(labels))) {
    throw Error(ErrorCode::ShapeMismatch, "features must be N x 6 with N labels");
  }
  std::vector<FeatureVector> out(static_cast<std::size_t>(features.rows()));
  for (std::size_t n = 0; n < out.size(); ++n) {
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
      out[n].shares[k] = features(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
    }
    out[n].label = class_from(labels[n]);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Wavelet energy features and a Levenberg-Marquardt trained tanh network for EEG classification";

  // Kept alive for the life of the interpreter; the translator below refers to it.
  static PyObject* error_type = PyErr_NewException("wnn._core.WnnError", PyExc_ValueError, nullptr);
  m.attr("WnnError") = py::handle(error_type);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
      exc.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error_type, exc.ptr());
    }
  });

  m.attr("BONN_SAMPLING_RATE") = kBonnSamplingRate;
  m.attr("FEATURE_NAMES") = std::vector<std::string>(kFeatureNames.begin(), kFeatureNames.end());
  m.attr("CLASSES") = std::vector<std::string>{"healthy", "epilepsy_syndrome", "seizure"};

  m.def("db4_lowpass", [] { return to_array(db4_filter().lowpass); });
  m.def("db4_highpass", [] { return to_array(db4_filter().highpass); });

  m.def(
      "dwt_step",
      [](const Array& x) {
        const auto r = dwt_step(view(x), db4_filter());
        return py::make_tuple(to_array(r.approximation), to_array(r.detail));
      },
      py::arg("x"), "One periodic db4 analysis step: (approximation, detail).");

  m.def(
      "decompose",
      [](const Array& x, int levels) {
        const auto d = decompose(view(x), db4_filter(), levels);
        py::list details;
        for (const auto& band : d.details) details.append(to_array(band));
        return py::make_tuple(details, to_array(d.approximation));
      },
      py::arg("x"), py::arg("levels") = kFeatureLevels, "db4 decomposition: ([D1, ..., Dl], Al).");

  m.def(
      "reconstruct",
      [](const std::vector<Array>& details, const Array& approximation) {
        Decomposition d;
        d.levels = static_cast<int>(details.size());
        for (const auto& band : details) {
          const auto v = view(band);
          d.details.emplace_back(v.begin(), v.end());
        }
        const auto a = view(approximation);
        d.approximation.assign(a.begin(), a.end());
        d.source_length = d.details.empty() ? d.approximation.size() : 2 * d.details.front().size();
        return to_array(reconstruct(d, db4_filter()));
      },
      py::arg("details"), py::arg("approximation"));

  m.def(
      "band_table",
      [](double fs, int levels) {
        py::list rows;
        for (const auto& b : band_table(fs, levels)) rows.append(py::make_tuple(b.name, b.low_hz, b.high_hz, b.rhythm));
        return rows;
      },
      py::arg("sampling_rate") = kBonnSamplingRate, py::arg("levels") = kFeatureLevels,
      "(name, low_hz, high_hz, rhythm) rows, D1 first.");

  m.def(
      "extract_features",
      [](const Array& x, double fs) {
        const auto v = view(x);
        const auto fv = extract_features(Signal(std::vector<double>(v.begin(), v.end()), fs));
        return to_array(std::vector<double>(fv.shares.begin(), fv.shares.end()));
      },
      py::arg("x"), py::arg("sampling_rate") = kBonnSamplingRate, "Energy shares D1..D5, A5.");

  m.def(
      "synth_corpus",
      [](std::uint64_t seed, int per_class) {
        py::list out;
        for (const auto& s : synth_corpus(seed, per_class)) out.append(segment_dict(s));
        return out;
      },
      py::arg("seed"), py::arg("per_class") = 100);

  m.def(
      "load_bonn",
      [](const std::filesystem::path& root) {
        py::list out;
        for (const auto& s : load_bonn(root, default_set_mapping())) out.append(segment_dict(s));
        return out;
      },
      py::arg("root"), "Segments from <root>/Z, N and S (sets A, C, E).");

  m.def(
      "split_indices",
      [](std::size_t total, std::size_t train_count, std::size_t test_count, std::uint64_t seed) {
        const auto idx = split_indices(total, SplitSpec{train_count, test_count, seed});
        return py::make_tuple(idx.train, idx.test);
      },
      py::arg("total"), py::arg("train_count"), py::arg("test_count"), py::arg("seed"));

  m.def("class_target", [](const py::handle& name) { return class_target(class_from(name)); });
  m.def("nearest_class", [](double y) { return std::string(to_string(nearest_class(y))); });

  py::class_<Network>(m, "Network")
      .def_static(
          "random", [](std::uint64_t seed, std::vector<int> sizes) { return init_network(seed, sizes); },
          py::arg("seed"), py::arg("layer_sizes") = kDefaultLayerSizes)
      .def_static(
          "load",
          [](const std::string& text) {
            std::istringstream in(text);
            return load_model(in);
          },
          py::arg("text"))
      .def("save",
           [](const Network& net) {
             std::ostringstream out;
             save_model(net, out);
             return out.str();
           })
      .def_property_readonly("layer_sizes", &Network::layer_sizes)
      .def_property(
          "parameters", [](const Network& net) { return to_array(net.parameters()); },
          [](Network& net, const Array& p) { net.set_parameters(view(p)); })
      .def("forward", [](const Network& net, const Array& x) { return net.forward(view(x)); }, py::arg("x"))
      .def("jacobian", [](const Network& net, const Eigen::MatrixXd& inputs) { return jacobian(net, inputs); },
           py::arg("inputs"))
      .def(
          "classify",
          [](const Network& net, const Array& shares) {
            const double y = net.forward(view(shares));
            return py::make_tuple(std::string(to_string(nearest_class(y))), y);
          },
          py::arg("shares"))
      .def(
          "train",
          [](Network& net, const Eigen::MatrixXd& features, const Eigen::VectorXd& targets, double mse_goal,
             int max_epochs) {
            TrainConfig cfg;
            cfg.mse_goal = mse_goal;
            cfg.max_epochs = max_epochs;
            const auto r = lm_train(net, features, targets, cfg);
            py::dict d;
            d["final_mse"] = r.final_mse;
            d["epochs_run"] = r.epochs_run;
            d["stop_reason"] = std::string(to_string(r.stop_reason));
            d["mse_history"] = r.mse_history;
            return d;
          },
          py::arg("features"), py::arg("targets"), py::arg("mse_goal") = 0.1, py::arg("max_epochs") = 1000,
          "Levenberg-Marquardt training in place; returns the training report.");

  m.def(
      "evaluate",
      [](const Network& net, const Eigen::MatrixXd& features, const py::sequence& labels) {
        return evaluate(net, feature_list(features, labels)).counts();
      },
      py::arg("net"), py::arg("features"), py::arg("labels"), "3x3 confusion counts, rows = true class.");

  m.def(
      "accuracies",
      [](const ConfusionMatrix::Counts& counts) {
        const auto acc = accuracies(ConfusionMatrix(counts));
        return py::make_tuple(std::vector<std::optional<double>>(acc.per_class.begin(), acc.per_class.end()),
                              acc.overall);
      },
      py::arg("counts"), "(per-class accuracies, None for absent classes; overall accuracy).");

  m.def("format_report", [](const ConfusionMatrix::Counts& counts) { return format_report(ConfusionMatrix(counts)); },
        py::arg("counts"));
}
