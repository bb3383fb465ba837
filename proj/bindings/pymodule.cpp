#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "invarlab/lab.hpp"
#include "invarlab/optimize.hpp"
#include "invarlab/prob.hpp"
#include "invarlab/report_io.hpp"
#include "invarlab/rng.hpp"
#include "invarlab/run.hpp"
#include "invarlab/scenario.hpp"
#include "invarlab/scenario_format.hpp"

namespace py = pybind11;
using namespace invarlab;

namespace {

std::vector<double> as_vector(std::span<const double> values) {
  return {values.begin(), values.end()};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact finite-alphabet information audits for site-invariant prediction";
  m.attr("__version__") = kToolVersion;

  static py::exception<CapacityError> capacity_error(m, "CapacityError");
  static py::exception<NumericalError> numerical_error(m, "NumericalError");
  static py::exception<ParseError> parse_error(m, "ScenarioParseError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const CapacityError& e) {
      py::set_error(capacity_error, e.what());
    } catch (const NumericalError& e) {
      py::set_error(numerical_error, e.what());
    } catch (const ParseError& e) {
      py::set_error(parse_error, e.what());
    } catch (const Error& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  py::class_<Alphabet>(m, "Alphabet")
      .def(py::init<std::string, std::vector<std::string>>(), py::arg("name"),
           py::arg("labels"))
      .def_static("indexed", &Alphabet::indexed, py::arg("name"), py::arg("size"))
      .def_readonly("name", &Alphabet::name)
      .def_readonly("labels", &Alphabet::labels)
      .def_property_readonly("size", &Alphabet::size)
      .def("__eq__", [](const Alphabet& a, const Alphabet& b) { return a == b; })
      .def("__repr__", [](const Alphabet& a) {
        return "Alphabet(" + a.name + ", size=" + std::to_string(a.size()) + ")";
      });

  py::class_<JointDistribution>(m, "JointDistribution")
      .def(py::init<std::vector<Alphabet>, std::vector<double>>(), py::arg("axes"),
           py::arg("mass"))
      .def_property_readonly("axes", &JointDistribution::axes)
      .def_property_readonly("mass",
                             [](const JointDistribution& d) { return as_vector(d.mass()); })
      .def_property_readonly("axis_count", &JointDistribution::axis_count)
      .def("at", [](const JointDistribution& d, std::vector<int> index) {
        return d.at(index);
      });

  py::class_<Channel>(m, "Channel")
      .def(py::init<Alphabet, Alphabet, std::vector<double>>(), py::arg("input"),
           py::arg("output"), py::arg("rows"))
      .def_static("identity", &Channel::identity)
      .def_static("constant", &Channel::constant, py::arg("input"), py::arg("output"),
                  py::arg("target") = 0)
      .def_static("deterministic",
                  [](const Alphabet& input, const Alphabet& output, std::vector<int> map) {
                    return Channel::deterministic(input, output, map);
                  })
      .def_static("binary_symmetric", &Channel::binary_symmetric, py::arg("input"),
                  py::arg("output"), py::arg("crossover"))
      .def_property_readonly("input", &Channel::input)
      .def_property_readonly("output", &Channel::output)
      .def_property_readonly("rows", [](const Channel& c) { return as_vector(c.rows()); })
      .def("__call__", &Channel::operator());

  py::enum_<ChannelMode>(m, "ChannelMode")
      .value("Replace", ChannelMode::Replace)
      .value("Append", ChannelMode::Append);

  m.def("entropy", &entropy, py::arg("dist"));
  m.def("binary_entropy", &binary_entropy, py::arg("p"));
  m.def("stable_sum",
        [](std::vector<double> values) { return stable_sum(values); });
  m.def("marginalize",
        [](const JointDistribution& joint, std::vector<int> keep) {
          return marginalize(joint, keep);
        },
        py::arg("joint"), py::arg("keep"));
  m.def("condition", &condition, py::arg("joint"), py::arg("axis"), py::arg("value"));
  m.def("mutual_information",
        [](const JointDistribution& joint, std::vector<int> a, std::vector<int> b) {
          return mutual_information(joint, a, b);
        },
        py::arg("joint"), py::arg("group_a"), py::arg("group_b"));

  py::class_<ConditionalInformation>(m, "ConditionalInformation")
      .def_readonly("bits", &ConditionalInformation::bits)
      .def_readonly("per_value", &ConditionalInformation::per_value)
      .def_readonly("skipped_values", &ConditionalInformation::skipped_values);

  m.def("conditional_mutual_information",
        [](const JointDistribution& joint, std::vector<int> a, std::vector<int> b,
           int conditioning_axis) {
          return conditional_mutual_information(joint, a, b, conditioning_axis);
        },
        py::arg("joint"), py::arg("group_a"), py::arg("group_b"),
        py::arg("conditioning_axis"));
  m.def("push_through_channel", &push_through_channel, py::arg("joint"), py::arg("axis"),
        py::arg("channel"), py::arg("mode") = ChannelMode::Replace);

  py::class_<BscScanner>(m, "BscScanner")
      .def(py::init<double>(), py::arg("crossover"))
      .def_readonly("crossover", &BscScanner::crossover);
  py::class_<ErasureScanner>(m, "ErasureScanner")
      .def(py::init<double>(), py::arg("erase_prob"))
      .def_readonly("erase_prob", &ErasureScanner::erase_prob);
  py::class_<ExplicitScanner>(m, "ExplicitScanner")
      .def(py::init<Channel>(), py::arg("rows"))
      .def_readonly("rows", &ExplicitScanner::rows);

  py::class_<ScannerModel>(m, "ScannerModel")
      .def(py::init([](int site,
                       std::variant<BscScanner, ErasureScanner, ExplicitScanner> model) {
             return ScannerModel{site, std::move(model)};
           }),
           py::arg("site"), py::arg("model"))
      .def_readonly("site", &ScannerModel::site)
      .def_readonly("model", &ScannerModel::model)
      .def("to_channel", &ScannerModel::to_channel, py::arg("labels"),
           py::arg("observations"));

  py::class_<IndependentCoupling>(m, "IndependentCoupling")
      .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("label_prior"),
           py::arg("site_prior"))
      .def_readonly("label_prior", &IndependentCoupling::label_prior)
      .def_readonly("site_prior", &IndependentCoupling::site_prior);
  py::class_<JointCoupling>(m, "JointCoupling")
      .def(py::init<std::vector<double>>(), py::arg("joint_ys"))
      .def_readonly("joint_ys", &JointCoupling::joint_ys);

  py::class_<Scenario>(m, "Scenario")
      .def(py::init<>())
      .def_readwrite("label_alphabet", &Scenario::label_alphabet)
      .def_readwrite("site_alphabet", &Scenario::site_alphabet)
      .def_readwrite("observation_alphabet", &Scenario::observation_alphabet)
      .def_readwrite("coupling", &Scenario::coupling)
      .def_readwrite("scanners", &Scenario::scanners)
      .def("validate", &Scenario::validate)
      .def("__eq__", [](const Scenario& a, const Scenario& b) { return a == b; });

  py::class_<ScenarioSizes>(m, "ScenarioSizes")
      .def(py::init([](int labels, int sites, int observations) {
             return ScenarioSizes{labels, sites, observations};
           }),
           py::arg("labels"), py::arg("sites"), py::arg("observations"))
      .def_readwrite("labels", &ScenarioSizes::labels)
      .def_readwrite("sites", &ScenarioSizes::sites)
      .def_readwrite("observations", &ScenarioSizes::observations);

  py::class_<SiteInformationProfile>(m, "SiteInformationProfile")
      .def_readonly("per_site", &SiteInformationProfile::per_site)
      .def_readonly("minimum_site", &SiteInformationProfile::minimum_site)
      .def_readonly("minimum_value", &SiteInformationProfile::minimum_value)
      .def_readonly("unconditional", &SiteInformationProfile::unconditional)
      .def_readonly("skipped_sites", &SiteInformationProfile::skipped_sites);

  py::class_<LabelSites>(m, "LabelSites")
      .def_readonly("label", &LabelSites::label)
      .def_readonly("sites", &LabelSites::sites)
      .def_readonly("exclusive", &LabelSites::exclusive)
      .def_readonly("degenerate", &LabelSites::degenerate);

  m.def("build_joint", &build_joint, py::arg("scenario"));
  m.def("per_site_information", &per_site_information, py::arg("joint"));
  m.def("random_scenario", &random_scenario, py::arg("seed"), py::arg("sizes"),
        py::arg("independent"), py::arg("concentration") = 1.0);
  m.def("site_exclusive_labels", &site_exclusive_labels, py::arg("joint"));
  m.def("two_site_bsc_scenario", &two_site_bsc_scenario, py::arg("crossover_a"),
        py::arg("crossover_b"));
  m.def("site_exclusive_scenario", &site_exclusive_scenario);
  m.def("identical_scanner_scenario", &identical_scanner_scenario, py::arg("seed"),
        py::arg("sizes"), py::arg("concentration") = 1.0);

  m.def("parse_scenario", [](const std::string& text) { return parse_scenario(text); },
        py::arg("text"));
  m.def("serialize_scenario", &serialize_scenario, py::arg("scenario"));
  m.def("parse_encoder",
        [](const std::string& text, const Alphabet& observations) {
          return parse_encoder(text, observations);
        },
        py::arg("text"), py::arg("observations"));
  m.def("serialize_encoder", &serialize_encoder, py::arg("encoder"));

  py::class_<Encoder>(m, "Encoder")
      .def(py::init<Channel>(), py::arg("channel"))
      .def_readonly("channel", &Encoder::channel)
      .def_property_readonly("z_alphabet", &Encoder::z_alphabet);
  m.def("identity_encoder", &identity_encoder, py::arg("observations"));
  m.def("constant_encoder", &constant_encoder, py::arg("observations"),
        py::arg("z_size") = 1);
  m.def("deterministic_encoder",
        [](const Alphabet& observations, std::vector<int> map, int z_size) {
          return deterministic_encoder(observations, map, z_size);
        },
        py::arg("observations"), py::arg("map"), py::arg("z_size"));
  m.def("stochastic_encoder", &stochastic_encoder, py::arg("observations"), py::arg("rows"),
        py::arg("z_size"));

  py::class_<Predictor>(m, "Predictor")
      .def_readonly("decision", &Predictor::decision);
  m.def("bayes_predictor", &bayes_predictor, py::arg("joint_yz"));

  py::class_<InformationReport>(m, "InformationReport")
      .def_readonly("i_y_z", &InformationReport::i_y_z)
      .def_readonly("i_z_s", &InformationReport::i_z_s)
      .def_readonly("i_s_y", &InformationReport::i_s_y)
      .def_readonly("i_y_yhat", &InformationReport::i_y_yhat)
      .def_readonly("i_yhat_s", &InformationReport::i_yhat_s)
      .def_readonly("per_site_i_y_z", &InformationReport::per_site_i_y_z)
      .def_readonly("per_site_i_y_x", &InformationReport::per_site_i_y_x)
      .def_readonly("risk", &InformationReport::risk)
      .def_readonly("prediction_rates", &InformationReport::prediction_rates)
      .def_readonly("skipped_sites", &InformationReport::skipped_sites)
      .def_readonly("predictor", &InformationReport::predictor);
  m.def("evaluate_encoder", &evaluate_encoder, py::arg("joint"), py::arg("encoder"));

  py::class_<EnumerationResult>(m, "EnumerationResult")
      .def_readonly("map", &EnumerationResult::map)
      .def_readonly("encoder", &EnumerationResult::encoder)
      .def_readonly("report", &EnumerationResult::report)
      .def_readonly("maps_scored", &EnumerationResult::maps_scored)
      .def_readonly("feasible_count", &EnumerationResult::feasible_count);
  m.def("enumerate_deterministic_optimum", &enumerate_deterministic_optimum,
        py::arg("joint"), py::arg("z_size"), py::arg("invariance_tolerance") = 1e-9);

  py::enum_<TradeoffMode>(m, "TradeoffMode")
      .value("Info", TradeoffMode::Info)
      .value("Risk", TradeoffMode::Risk);

  py::class_<OptimizeOptions>(m, "OptimizeOptions")
      .def(py::init<>())
      .def_readwrite("z_size", &OptimizeOptions::z_size)
      .def_readwrite("restarts", &OptimizeOptions::restarts)
      .def_readwrite("max_iters", &OptimizeOptions::max_iters)
      .def_readwrite("tolerance", &OptimizeOptions::tolerance)
      .def_readwrite("seed", &OptimizeOptions::seed)
      .def_readwrite("initial_step", &OptimizeOptions::initial_step);

  py::class_<ObjectiveEval>(m, "ObjectiveEval")
      .def_readonly("value", &ObjectiveEval::value)
      .def_readonly("gradient", &ObjectiveEval::gradient);
  m.def("lagrangian_objective",
        [](const JointDistribution& joint, std::vector<double> encoder_rows, int z_size,
           double lambda, TradeoffMode mode) {
          return lagrangian_objective(joint, encoder_rows, z_size, lambda, mode);
        },
        py::arg("joint"), py::arg("encoder_rows"), py::arg("z_size"), py::arg("lambda"),
        py::arg("mode") = TradeoffMode::Info);

  py::class_<TradeoffPoint>(m, "TradeoffPoint")
      .def_property_readonly("lambda", [](const TradeoffPoint& p) { return p.lambda; })
      .def_readonly("report", &TradeoffPoint::report)
      .def_readonly("objective_value", &TradeoffPoint::objective_value)
      .def_readonly("converged", &TradeoffPoint::converged)
      .def_readonly("restarts_used", &TradeoffPoint::restarts_used)
      .def_readonly("encoder", &TradeoffPoint::encoder);
  m.def("lagrangian_optimize", &lagrangian_optimize, py::arg("joint"), py::arg("lambda"),
        py::arg("mode") = TradeoffMode::Info, py::arg("options") = OptimizeOptions{});

  py::class_<Frontier>(m, "Frontier")
      .def_readonly("points", &Frontier::points)
      .def_readonly("pareto", &Frontier::pareto);
  m.def("sweep_frontier",
        [](const JointDistribution& joint, std::vector<double> grid, TradeoffMode mode,
           const OptimizeOptions& options) {
          return sweep_frontier(joint, grid, mode, options);
        },
        py::arg("joint"), py::arg("lambda_grid"), py::arg("mode") = TradeoffMode::Info,
        py::arg("options") = OptimizeOptions{});
  m.def("default_lambda_grid", &default_lambda_grid, py::arg("lambda_min") = 1e-3,
        py::arg("lambda_max") = 1e3, py::arg("points") = 33);
  m.def("project_to_simplex", [](std::vector<double> values) {
    project_to_simplex(values);
    return values;
  });

  py::enum_<Prop1Verdict>(m, "Prop1Verdict")
      .value("Holds", Prop1Verdict::Holds)
      .value("Violated", Prop1Verdict::Violated)
      .value("HypothesisNotMet", Prop1Verdict::HypothesisNotMet);

  py::class_<Prop1Tolerances>(m, "Prop1Tolerances")
      .def(py::init<>())
      .def_readwrite("hypothesis", &Prop1Tolerances::hypothesis)
      .def_readwrite("slack", &Prop1Tolerances::slack);

  py::class_<Prop1Report>(m, "Prop1Report")
      .def_readonly("lhs", &Prop1Report::lhs)
      .def_readonly("rhs", &Prop1Report::rhs)
      .def_readonly("slack", &Prop1Report::slack)
      .def_readonly("rhs_site", &Prop1Report::rhs_site)
      .def_readonly("hypothesis_i_s_y", &Prop1Report::hypothesis_i_s_y)
      .def_readonly("hypothesis_i_z_s", &Prop1Report::hypothesis_i_z_s)
      .def_readonly("hypothesis_satisfied", &Prop1Report::hypothesis_satisfied)
      .def_readonly("identity_deviation", &Prop1Report::identity_deviation)
      .def_readonly("per_site_i_y_z", &Prop1Report::per_site_i_y_z)
      .def_readonly("verdict", &Prop1Report::verdict);
  m.def("check_prop1", &check_prop1, py::arg("joint"), py::arg("encoder"),
        py::arg("tolerances") = Prop1Tolerances{});

  py::class_<Prop2Report>(m, "Prop2Report")
      .def_readonly("exclusive_label", &Prop2Report::exclusive_label)
      .def_readonly("home_site", &Prop2Report::home_site)
      .def_readonly("recall_at_home", &Prop2Report::recall_at_home)
      .def_readonly("false_positive_rate_elsewhere",
                    &Prop2Report::false_positive_rate_elsewhere)
      .def_readonly("rate_gap", &Prop2Report::rate_gap)
      .def_readonly("i_z_s", &Prop2Report::i_z_s)
      .def_readonly("rate_by_site", &Prop2Report::rate_by_site);
  m.def("check_prop2", &check_prop2, py::arg("joint"), py::arg("encoder"),
        py::arg("exclusive_label"), py::arg("home_site"));

  py::enum_<ScannerFamily>(m, "ScannerFamily")
      .value("Identical", ScannerFamily::Identical)
      .value("IndependentRandom", ScannerFamily::IndependentRandom)
      .value("FreeRandom", ScannerFamily::FreeRandom);

  py::class_<SearchConfig>(m, "SearchConfig")
      .def(py::init<>())
      .def_readwrite("instances", &SearchConfig::instances)
      .def_readwrite("seed", &SearchConfig::seed)
      .def_readwrite("sizes", &SearchConfig::sizes)
      .def_readwrite("z_size", &SearchConfig::z_size)
      .def_readwrite("invariance_tolerance", &SearchConfig::invariance_tolerance)
      .def_readwrite("slack_margin", &SearchConfig::slack_margin)
      .def_readwrite("scanner_family", &SearchConfig::scanner_family)
      .def_readwrite("concentration", &SearchConfig::concentration);

  py::class_<SearchEntry>(m, "SearchEntry")
      .def_readonly("instance", &SearchEntry::instance)
      .def_readonly("report", &SearchEntry::report)
      .def_readonly("scenario", &SearchEntry::scenario)
      .def_readonly("encoder_map", &SearchEntry::encoder_map);

  py::class_<SearchCatalog>(m, "SearchCatalog")
      .def_readonly("config", &SearchCatalog::config)
      .def_readonly("instances_run", &SearchCatalog::instances_run)
      .def_readonly("entries", &SearchCatalog::entries);
  m.def("counterexample_search", &counterexample_search, py::arg("config"));

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("command", &RunConfig::command)
      .def_readwrite("scenario_path", &RunConfig::scenario_path)
      .def_readwrite("encoder_spec", &RunConfig::encoder_spec)
      .def_readwrite("z_size", &RunConfig::z_size)
      .def_readwrite("lambda_min", &RunConfig::lambda_min)
      .def_readwrite("lambda_max", &RunConfig::lambda_max)
      .def_readwrite("lambda_points", &RunConfig::lambda_points)
      .def_readwrite("mode", &RunConfig::mode)
      .def_readwrite("restarts", &RunConfig::restarts)
      .def_readwrite("max_iters", &RunConfig::max_iters)
      .def_readwrite("tolerance", &RunConfig::tolerance)
      .def_readwrite("invariance_tolerance", &RunConfig::invariance_tolerance)
      .def_readwrite("slack_margin", &RunConfig::slack_margin)
      .def_readwrite("seed", &RunConfig::seed)
      .def_readwrite("instances", &RunConfig::instances)
      .def_readwrite("scanner_family", &RunConfig::scanner_family)
      .def_readwrite("sizes", &RunConfig::sizes)
      .def_readwrite("concentration", &RunConfig::concentration)
      .def_readwrite("label", &RunConfig::label)
      .def_readwrite("home_site", &RunConfig::home_site)
      .def_readwrite("out_dir", &RunConfig::out_dir)
      .def("dispatch", &dispatch);
  m.def("dispatch", &dispatch, py::arg("config"));
}
