#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "aaseq/cli.hpp"
#include "aaseq/embed.hpp"
#include "aaseq/error.hpp"
#include "aaseq/seq_io.hpp"
#include "aaseq/trainer.hpp"

namespace py = pybind11;

namespace {

aaseq::SpectrumConfig make_config(const std::string& method, int k, int m, int g,
                                  const aaseq::Alphabet& alphabet) {
  aaseq::SpectrumConfig cfg{aaseq::parse_embed_method(method), k, m, g, alphabet};
  cfg.validate();
  return cfg;
}

aaseq::TrainConfig make_train_config(double alpha, int iters, std::uint64_t seed,
                                     const std::string& norm, double step, double epsilon) {
  aaseq::TrainConfig cfg;
  cfg.alpha = alpha;
  cfg.iters = iters;
  cfg.seed = seed;
  cfg.norm = aaseq::parse_norm_mode(norm);
  cfg.step = step;
  cfg.epsilon = epsilon;
  return cfg;
}

py::dict trace_dict(const aaseq::TrainingTrace& trace) {
  std::vector<int> iteration;
  std::vector<double> loss, acc;
  for (const auto& r : trace.records) {
    iteration.push_back(r.iteration);
    loss.push_back(r.mean_loss);
    acc.push_back(r.accuracy);
  }
  py::dict d;
  d["iteration"] = iteration;
  d["mean_loss"] = loss;
  d["accuracy"] = acc;
  d["status"] = trace.status == aaseq::TrainStatus::Ok ? "ok" : "nonfinite";
  d["diagnostic"] = trace.diagnostic;
  d["degenerate_samples"] = trace.degenerate_samples;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sequence spectra and Anderson-accelerated linear classifier training";

  py::register_exception<aaseq::Error>(m, "AaseqError", PyExc_ValueError);

  py::class_<aaseq::Alphabet>(m, "Alphabet")
      .def(py::init<std::string_view>(), py::arg("symbols"))
      .def_static("amino_acids", &aaseq::Alphabet::amino_acids)
      .def_static("nucleotides", &aaseq::Alphabet::nucleotides)
      .def_property_readonly("symbols", &aaseq::Alphabet::symbols)
      .def("__len__", &aaseq::Alphabet::size)
      .def("__repr__", [](const aaseq::Alphabet& a) { return "Alphabet('" + a.symbols() + "')"; });

  m.def(
      "parse_fasta",
      [](std::string_view text, const aaseq::Alphabet& alphabet) {
        std::vector<std::pair<std::string, std::string>> out;
        for (auto& r : aaseq::parse_fasta(text, alphabet)) out.emplace_back(r.id, r.residues);
        return out;
      },
      py::arg("text"), py::arg("alphabet") = aaseq::Alphabet::amino_acids());

  m.def(
      "synth_dataset",
      [](int num_classes, int per_class, int length, int motif_len, double noise,
         std::uint64_t seed, const aaseq::Alphabet& alphabet) {
        const auto out =
            aaseq::synth_dataset({num_classes, per_class, length, motif_len, noise, seed}, alphabet);
        std::vector<std::string> ids, residues, labels;
        for (const auto& s : out.dataset.sequences) {
          ids.push_back(s.id);
          residues.push_back(s.residues);
          labels.push_back(s.label);
        }
        py::dict d;
        d["ids"] = ids;
        d["residues"] = residues;
        d["labels"] = labels;
        d["classes"] = out.dataset.classes;
        d["motifs"] = out.motifs;
        return d;
      },
      py::arg("num_classes"), py::arg("per_class"), py::arg("length"), py::arg("motif_len"),
      py::arg("noise"), py::arg("seed"), py::arg("alphabet") = aaseq::Alphabet::amino_acids());

  m.def(
      "enumerate_kmers",
      [](const std::string& residues, int k) {
        std::vector<std::string> out;
        for (auto v : aaseq::enumerate_kmers(residues, k)) out.emplace_back(v);
        return out;
      },
      py::arg("residues"), py::arg("k"));
  m.def("minimizer_of_kmer", &aaseq::minimizer_of_kmer, py::arg("kmer"), py::arg("m"),
        py::arg("alphabet") = aaseq::Alphabet::amino_acids());
  m.def(
      "spectrum",
      [](const std::string& residues, const std::string& method, int k, int mm, int g,
         const aaseq::Alphabet& alphabet) {
        return aaseq::spectrum(residues, make_config(method, k, mm, g, alphabet));
      },
      py::arg("residues"), py::arg("method") = "spike2vec", py::arg("k") = 3, py::arg("m") = 3,
      py::arg("g") = 9, py::arg("alphabet") = aaseq::Alphabet::amino_acids());
  m.def(
      "embed",
      [](const std::vector<std::string>& residues, const std::string& method, int k, int mm, int g,
         const aaseq::Alphabet& alphabet, std::size_t pca_threshold, int pca_components) {
        aaseq::Dataset ds;
        for (std::size_t i = 0; i < residues.size(); ++i) {
          ds.sequences.push_back({"s" + std::to_string(i), residues[i], "unlabeled"});
        }
        ds.classes = {"unlabeled"};
        return aaseq::embed_dataset(ds, make_config(method, k, mm, g, alphabet),
                                    {pca_threshold, pca_components})
            .values;
      },
      py::arg("residues"), py::arg("method") = "spike2vec", py::arg("k") = 3, py::arg("m") = 3,
      py::arg("g") = 9, py::arg("alphabet") = aaseq::Alphabet::amino_acids(),
      py::arg("pca_threshold") = 1000, py::arg("pca_components") = 500);

  py::class_<aaseq::PcaModel>(m, "PcaModel")
      .def_readonly("mean", &aaseq::PcaModel::mean)
      .def_readonly("components", &aaseq::PcaModel::components)
      .def_readonly("explained_variance", &aaseq::PcaModel::explained_variance);
  m.def("fit_pca", &aaseq::fit_pca, py::arg("data"), py::arg("r"));
  m.def(
      "apply_pca",
      [](const aaseq::PcaModel& model, const Eigen::MatrixXd& data) {
        return aaseq::apply_pca(model, data);
      },
      py::arg("model"), py::arg("data"));

  m.def("init_weights", &aaseq::init_weights, py::arg("num_classes"), py::arg("dim"),
        py::arg("seed"));
  m.def(
      "normalize_prediction",
      [](const Eigen::VectorXd& scores, const std::string& norm, double epsilon) {
        return aaseq::normalize_prediction(scores, aaseq::parse_norm_mode(norm), epsilon);
      },
      py::arg("scores"), py::arg("norm") = "softmax", py::arg("epsilon") = 1e-10);
  m.def("cross_entropy", &aaseq::cross_entropy, py::arg("y"), py::arg("p"),
        py::arg("epsilon") = 1e-10);
  m.def(
      "batch_gradient",
      [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const Eigen::MatrixXd& w,
         const std::string& norm, double epsilon) {
        return aaseq::batch_gradient(x, y, w, aaseq::parse_norm_mode(norm), epsilon);
      },
      py::arg("features"), py::arg("targets"), py::arg("weights"), py::arg("norm") = "softmax",
      py::arg("epsilon") = 1e-10);
  m.def(
      "train",
      [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double alpha, int iters,
         std::uint64_t seed, const std::string& norm, double step, double epsilon) {
        const auto result =
            aaseq::train(x, y, make_train_config(alpha, iters, seed, norm, step, epsilon));
        py::dict d = trace_dict(result.trace);
        d["weights"] = result.state.weights;
        return d;
      },
      py::arg("features"), py::arg("targets"), py::arg("alpha") = 0.0, py::arg("iters") = 700,
      py::arg("seed") = 0, py::arg("norm") = "softmax", py::arg("step") = 1.0,
      py::arg("epsilon") = 1e-10);
  m.def(
      "alpha_sweep",
      [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, std::vector<double> grid,
         double threshold, int iters, std::uint64_t seed, const std::string& norm, double step,
         double epsilon) {
        if (grid.empty()) grid = aaseq::default_alpha_grid();
        const auto sweep = aaseq::alpha_sweep(
            x, y, make_train_config(0.0, iters, seed, norm, step, epsilon), grid, threshold);
        py::list runs;
        for (const auto& run : sweep.runs) {
          py::dict r;
          r["alpha"] = run.alpha;
          r["failed"] = run.failed;
          r["final_loss"] = run.final_loss;
          r["iterations_to_threshold"] = run.iterations_to_threshold;
          r["trace"] = trace_dict(run.trace);
          runs.append(r);
        }
        py::dict d;
        d["runs"] = runs;
        d["best_alpha"] = sweep.best_alpha;
        return d;
      },
      py::arg("features"), py::arg("targets"), py::arg("grid") = std::vector<double>{},
      py::arg("threshold") = 0.0, py::arg("iters") = 300, py::arg("seed") = 0,
      py::arg("norm") = "softmax", py::arg("step") = 1.0, py::arg("epsilon") = 1e-10);
  m.def("default_alpha_grid", &aaseq::default_alpha_grid);

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "aaseq");
        std::ostringstream out, err;
        const int code = aaseq::run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the aaseq CLI in-process; returns (exit_code, stdout, stderr).");

  m.attr("__version__") = std::string(aaseq::kToolVersion);
}
