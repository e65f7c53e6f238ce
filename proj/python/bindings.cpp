#include "adipredict/dataset.hpp"
#include "adipredict/error.hpp"
#include "adipredict/experiment.hpp"
#include "adipredict/fatmask.hpp"
#include "adipredict/fixed_models.hpp"
#include "adipredict/metrics.hpp"
#include "adipredict/model_io.hpp"
#include "adipredict/regressors.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace adipredict;

namespace {

py::dict counts_dict(const SliceCounts& c)
{
    py::dict d;
    d["patient_id"] = c.patient_id;
    d["slice_index"] = c.slice_index;
    d["images_qnt"] = c.images_qnt;
    d["red"] = c.red;
    d["green"] = c.green;
    d["blue"] = c.blue;
    d["grey"] = c.grey;
    d["black"] = c.black;
    return d;
}

SliceCounts counts_from(const py::dict& d)
{
    SliceCounts c;
    c.slice_index = 0;
    c.images_qnt = 0;
    for (auto [key, value] : d) {
        const auto k = key.cast<std::string>();
        if (k == "patient_id") c.patient_id = value.cast<std::string>();
        else if (k == "slice_index") c.slice_index = value.cast<int>();
        else if (k == "images_qnt") c.images_qnt = value.cast<int>();
        else if (k == "red") c.red = value.cast<double>();
        else if (k == "green") c.green = value.cast<double>();
        else if (k == "blue") c.blue = value.cast<double>();
        else if (k == "grey") c.grey = value.cast<double>();
        else if (k == "black") c.black = value.cast<double>();
        else throw py::key_error("unknown slice quantity '" + k + "'");
    }
    return c;
}

py::object opt(const std::optional<double>& v)
{
    return v ? py::object(py::float_(*v)) : py::object(py::none());
}

py::dict report_dict(const EvalReport& r)
{
    py::dict d;
    d["rho"] = opt(r.rho);
    d["mae"] = r.mae;
    d["rmse"] = r.rmse;
    d["rae_pct"] = opt(r.rae_pct);
    d["rrse_pct"] = opt(r.rrse_pct);
    d["n"] = r.n;
    d["status"] = std::string(to_string(r.status));
    return d;
}

FixedEquation equation(const std::string& name)
{
    auto id = parse_fixed_equation(name);
    if (!id) {
        throw py::value_error("unknown fixed equation '" + name + "'");
    }
    return *id;
}

py::dict linear_dict(const LinearModel& m)
{
    py::dict d;
    d["target"] = m.target_name;
    d["bias"] = m.bias;
    py::dict w;
    for (std::size_t j = 0; j < m.weights.size(); ++j) {
        w[py::str(m.feature_names[j])] = m.weights[j];
    }
    d["weights"] = w;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Cardiac fat mask counting, regression benchmarks and fixed-model prediction";

    py::register_exception<Error>(m, "Error", PyExc_ValueError);

    m.def(
        "classify_pixel", [](int r, int g, int b) { return std::string(to_string(classify_pixel(
                                                        {std::uint8_t(r), std::uint8_t(g), std::uint8_t(b)}))); },
        py::arg("r"), py::arg("g"), py::arg("b"));

    m.def(
        "count_slice",
        [](py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast> image, const std::string& patient_id,
           int slice_index, int images_qnt, std::tuple<double, double, double> spacing) {
            if (image.ndim() != 3 || image.shape(2) < 3) {
                throw py::value_error("expected an (height, width, 3 or 4) uint8 array");
            }
            RgbImage img;
            img.height = std::size_t(image.shape(0));
            img.width = std::size_t(image.shape(1));
            img.pixels.resize(img.width * img.height);
            auto px = image.unchecked<3>();
            for (py::ssize_t y = 0; y < image.shape(0); ++y) {
                for (py::ssize_t x = 0; x < image.shape(1); ++x) {
                    img.pixels[std::size_t(y) * img.width + std::size_t(x)] = {px(y, x, 0), px(y, x, 1), px(y, x, 2)};
                }
            }
            auto [dx, dy, dz] = spacing;
            return counts_dict(count_slice(img, SliceMeta{patient_id, slice_index, images_qnt, {dx, dy, dz}}));
        },
        py::arg("image"), py::arg("patient_id") = "", py::arg("slice_index") = 1, py::arg("images_qnt") = 1,
        py::arg("spacing") = std::make_tuple(1.0, 1.0, 1.0));

    m.def(
        "counts_to_volume",
        [](double count, std::tuple<double, double, double> s) {
            return counts_to_volume(count, {std::get<0>(s), std::get<1>(s), std::get<2>(s)});
        },
        py::arg("count"), py::arg("spacing"));

    m.def("load_counts_csv", [](const std::filesystem::path& path) {
        py::list out;
        for (const auto& c : load_counts_csv(path)) {
            out.append(counts_dict(c));
        }
        return out;
    });

    m.def(
        "evaluate",
        [](const std::vector<double>& predicted, const std::vector<double>& actual) {
            if (predicted.size() != actual.size()) {
                throw py::value_error("predicted and actual differ in length");
            }
            PredictionSet pairs;
            for (std::size_t i = 0; i < predicted.size(); ++i) {
                pairs.push_back({predicted[i], actual[i]});
            }
            return report_dict(evaluate(pairs));
        },
        py::arg("predicted"), py::arg("actual"));

    m.def(
        "predict_fixed", [](const std::string& name, const py::dict& counts) {
            return predict_fixed(equation(name), counts_from(counts));
        },
        py::arg("equation"), py::arg("counts"));

    m.def("fixed_coefficients", [](const std::string& name) { return linear_dict(fixed_model(equation(name))); });

    m.def(
        "invert_fixed",
        [](const std::string& name, const std::string& solve_for) {
            return linear_dict(invert_linear(fixed_model(equation(name)), solve_for));
        },
        py::arg("equation"), py::arg("solve_for"));

    m.def(
        "split_folds", [](std::size_t n, std::size_t k, std::uint64_t seed) { return split_folds(n, k, seed).assignments; },
        py::arg("n"), py::arg("k"), py::arg("seed"));

    m.def(
        "run_experiment",
        [](const std::filesystem::path& dataset, const std::string& task, const std::vector<std::string>& algorithms,
           std::size_t folds, std::uint64_t seed, double budget_s, bool group_by_patient, std::size_t jobs) {
            auto t = parse_task(task);
            if (!t) {
                throw py::value_error("unknown task '" + task + "'");
            }
            ExperimentSpec spec;
            spec.task = *t;
            for (const auto& a : algorithms.empty() ? default_algorithms() : algorithms) {
                spec.algorithms.push_back(parse_algorithm(a));
            }
            spec.folds = folds;
            spec.seed = seed;
            spec.budget_s = budget_s;
            spec.group_by_patient = group_by_patient;
            spec.jobs = jobs;
            spec.validate();
            const auto ds = load_csv(dataset, *t);
            RankingReport report;
            {
                py::gil_scoped_release release;
                report = run_cv(ds, spec);
            }
            py::list rows;
            for (const auto& row : report.rows) {
                py::dict d = row.eval ? report_dict(*row.eval) : py::dict();
                d["algorithm"] = row.algorithm;
                d["outcome"] = std::string(to_string(row.status));
                if (!row.message.empty()) {
                    d["message"] = row.message;
                }
                rows.append(d);
            }
            return rows;
        },
        py::arg("dataset"), py::arg("task") = "mediastinal-from-epicardial",
        py::arg("algorithms") = std::vector<std::string>{}, py::arg("folds") = 10, py::arg("seed") = 1,
        py::arg("budget_s") = 600.0, py::arg("group_by_patient") = false, py::arg("jobs") = 1);

    m.def(
        "predict_model",
        [](const std::filesystem::path& model_path, const std::vector<std::vector<double>>& rows) {
            const auto model = load_model(model_path);
            std::vector<double> out;
            out.reserve(rows.size());
            for (const auto& x : rows) {
                out.push_back(model.predict(x));
            }
            return out;
        },
        py::arg("model_path"), py::arg("rows"));
}
