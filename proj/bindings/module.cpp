#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "commentox/annotation.hpp"
#include "commentox/behavior.hpp"
#include "commentox/cli.hpp"
#include "commentox/corpus.hpp"
#include "commentox/errors.hpp"
#include "commentox/numerics.hpp"
#include "commentox/stats.hpp"
#include "commentox/synth.hpp"
#include "commentox/toxicity.hpp"

namespace py = pybind11;
using namespace ctox;

namespace {

py::dict fit_to_dict(const RegressionResult& r) {
    py::dict d;
    d["intercept"] = r.intercept;
    d["intercept_se"] = r.intercept_se;
    d["slope"] = r.slope;
    d["slope_se"] = r.slope_se;
    d["t_slope"] = r.t_slope;
    d["p_slope"] = r.p_slope;
    d["r2"] = r.r2;
    d["adj_r2"] = r.adj_r2;
    d["num_obs"] = r.num_obs;
    return d;
}

DelayGrouping grouping_from(const std::string& token) {
    if (token == "all") return DelayGrouping::All;
    if (token == "label") return DelayGrouping::ByLabel;
    if (token == "category") return DelayGrouping::ByCategory;
    if (token == "label_category") return DelayGrouping::ByLabelAndCategory;
    throw ValidationError("unknown grouping '" + token + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "measurement pipeline for toxicity in online discussions";

    py::register_exception<Error>(m, "PipelineError");

    py::class_<Corpus>(m, "Corpus")
        .def_property_readonly(
            "num_channels", [](const Corpus& c) { return c.channels().size(); })
        .def_property_readonly(
            "num_videos", [](const Corpus& c) { return c.videos().size(); })
        .def_property_readonly(
            "num_comments", [](const Corpus& c) { return c.comments().size(); })
        .def_property_readonly("labeled_comments",
                               [](const Corpus& c) { return c.labeled_comment_count(); })
        .def_property_readonly("fully_labeled",
                               [](const Corpus& c) { return c.fully_labeled(); });

    m.def("load_corpus", &load_corpus, py::arg("channels"), py::arg("videos"),
          py::arg("comments"));
    m.def("save_corpus", &save_corpus, py::arg("corpus"), py::arg("out_dir"));
    m.def(
        "attach_labels",
        [](const Corpus& corpus, const std::string& path) {
            AttachResult r = attach_labels(corpus, path);
            return py::make_tuple(std::move(r.corpus), r.labeled, r.unknown_ids);
        },
        py::arg("corpus"), py::arg("labels_path"));
    m.def(
        "synth_corpus",
        [](const std::string& spec_json, uint64_t seed) {
            return synth_corpus(parse_synth_spec(spec_json), seed);
        },
        py::arg("spec_json"), py::arg("seed"));

    m.def("breakdown_csv",
          [](const Corpus& c) { return render_breakdown_csv(breakdown(c)); });
    m.def(
        "delays_csv",
        [](const Corpus& c, const std::string& grouping, double trim) {
            return render_delay_csv(delay_stats(c, grouping_from(grouping), trim));
        },
        py::arg("corpus"), py::arg("grouping") = "label_category",
        py::arg("trim") = 0.20);
    m.def(
        "regression_csv",
        [](const Corpus& c, int bins, double cutoff, uint64_t seed, int shuffles) {
            SuiteOptions options;
            options.n_bins = bins;
            options.cutoff_quantile = cutoff;
            options.seed = seed;
            options.shuffles = shuffles;
            return render_regression_csv(regression_suite(c, options));
        },
        py::arg("corpus"), py::arg("bins") = 24, py::arg("cutoff") = 0.99,
        py::arg("seed") = 0, py::arg("shuffles") = 1);
    m.def("profiles_csv", [](const Corpus& c) {
        auto profiles = user_profiles(c);
        return render_profiles_csv(profiles);
    });

    m.def("krippendorff_interval", &krippendorff_interval, py::arg("units"));
    m.def(
        "ols_fit",
        [](const std::vector<double>& x, const std::vector<double>& y) {
            return fit_to_dict(ols_fit_xy(x, y));
        },
        py::arg("x"), py::arg("y"));
    m.def("student_t_two_sided_p", &student_t_two_sided_p, py::arg("t"),
          py::arg("df"));
    m.def(
        "trimmed_mean",
        [](const std::vector<double>& xs, double trim) {
            return trimmed_mean_upper(xs, trim);
        },
        py::arg("values"), py::arg("trim") = 0.20);

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::vector<const char*> argv;
            argv.push_back("commentox");
            for (const std::string& a : args) argv.push_back(a.c_str());
            return run(static_cast<int>(argv.size()), argv.data());
        },
        py::arg("args"), "run one CLI invocation; returns the exit code");
}
