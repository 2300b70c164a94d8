#include "augmod/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "augmod/runtime.hpp"

namespace augmod {

namespace {

int argmax_lowest(const nn::VecX<float>& p) {
  int best = 0;
  for (int i = 1; i < p.size(); ++i)
    if (p[i] > p[best]) best = i;
  return best;
}

std::string format_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

std::vector<int> predict_classes(const nn::Network<float>& net, const DatasetView& view) {
  std::vector<int> preds(static_cast<std::size_t>(view.size()));
  parallel_for(view.size(), [&](std::int64_t i) {
    nn::MatX<float> x = view.signal(i);
    preds[static_cast<std::size_t>(i)] = argmax_lowest(net.predict(x));
  });
  return preds;
}

MetricsReport tally(const std::vector<std::string>& class_names, const std::vector<int>& labels,
                    const std::vector<int>& preds, const std::vector<std::string>& group_of,
                    const std::vector<std::string>& group_order) {
  if (labels.size() != preds.size())
    throw std::invalid_argument("tally: label/prediction count mismatch");
  if (!group_of.empty() && group_of.size() != labels.size())
    throw std::invalid_argument("tally: group label count mismatch");

  const int n_classes = static_cast<int>(class_names.size());
  MetricsReport report;
  report.class_names = class_names;
  report.confusion = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(n_classes,
                                                                                       n_classes);

  std::map<std::string, std::size_t> group_index;
  for (const auto& g : group_order) {
    group_index.emplace(g, report.groups.size());
    report.groups.push_back({g, 0, 0});
  }

  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int t = labels[i];
    const int p = preds[i];
    if (t < 0 || t >= n_classes || p < 0 || p >= n_classes)
      throw std::invalid_argument("tally: class index out of range");
    const bool ok = t == p;
    report.overall.count += 1;
    report.overall.correct += ok;
    report.confusion(t, p) += 1;
    if (!group_of.empty()) {
      auto [it, inserted] = group_index.emplace(group_of[i], report.groups.size());
      if (inserted) report.groups.push_back({group_of[i], 0, 0});
      GroupStat& g = report.groups[it->second];
      g.count += 1;
      g.correct += ok;
    }
  }
  return report;
}

MetricsReport evaluate(const nn::Network<float>& net, const DatasetView& view,
                       Eigen::Index length_override) {
  if (view.data->n_classes() != net.config().n_classes)
    throw std::invalid_argument("evaluate: dataset/model class count mismatch");
  DatasetView v = length_override > 0 ? view.truncated(length_override) : view;
  if (v.effective_length() > static_cast<Eigen::Index>(view.data->n_samples))
    throw std::invalid_argument("evaluate: length override exceeds stored sample count");
  const auto preds = predict_classes(net, v);
  std::vector<int> labels(preds.size());
  for (std::int64_t i = 0; i < v.size(); ++i)
    labels[static_cast<std::size_t>(i)] = v.example(i).label;
  return tally(view.data->class_names, labels, preds);
}

MetricsReport sweep_snr(const nn::Network<float>& net, const DatasetView& view) {
  const auto preds = predict_classes(net, view);
  std::vector<int> labels(preds.size());
  std::vector<std::string> group_of(preds.size());
  std::map<float, int> seen;
  for (std::int64_t i = 0; i < view.size(); ++i) {
    const Example& ex = view.example(i);
    labels[static_cast<std::size_t>(i)] = ex.label;
    seen.emplace(ex.snr_db, 0);
  }
  std::vector<std::string> order;
  for (const auto& [snr, _] : seen) order.push_back("snr=" + format_g(snr));
  for (std::int64_t i = 0; i < view.size(); ++i)
    group_of[static_cast<std::size_t>(i)] = "snr=" + format_g(view.example(i).snr_db);
  return tally(view.data->class_names, labels, preds, group_of, order);
}

MetricsReport sweep_length(const nn::Network<float>& net, const DatasetView& view,
                           const std::vector<Eigen::Index>& lengths) {
  if (lengths.empty()) throw std::invalid_argument("sweep_length: empty length grid");
  for (Eigen::Index n : lengths)
    if (n > static_cast<Eigen::Index>(view.data->n_samples))
      throw std::invalid_argument("sweep_length: dataset stores fewer samples than " +
                                  std::to_string(n));

  std::vector<int> labels;
  std::vector<int> preds;
  std::vector<std::string> group_of;
  std::vector<std::string> order;
  for (Eigen::Index n : lengths) {
    const std::string label = "len=" + std::to_string(n);
    order.push_back(label);
    const auto p = predict_classes(net, view.truncated(n));  // same weights every pass
    for (std::int64_t i = 0; i < view.size(); ++i) {
      labels.push_back(view.example(i).label);
      preds.push_back(p[static_cast<std::size_t>(i)]);
      group_of.push_back(label);
    }
  }
  return tally(view.data->class_names, labels, preds, group_of, order);
}

std::vector<double> half_decade_edges() {
  std::vector<double> edges;
  for (double e = -6.0; e < -0.5 + 1e-9; e += 0.5) edges.push_back(std::pow(10.0, e));
  edges.push_back(0.5);
  return edges;
}

std::string freq_bin_label(double abs_freq, const std::vector<double>& edges) {
  std::size_t bin = 0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    if (abs_freq >= edges[i]) bin = i;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "|df|=[%.3g,%.3g)", edges[bin], edges[bin + 1]);
  return buf;
}

MetricsReport sweep_freq_offset(const nn::Network<float>& net, const DatasetView& view,
                                const std::vector<double>& edges, bool sign_split) {
  if (edges.size() < 2) throw std::invalid_argument("sweep_freq_offset: need at least one bin");
  for (std::int64_t i = 0; i < view.size(); ++i)
    if (view.example(i).freq_offset == 0.0f)
      throw std::invalid_argument(
          "sweep_freq_offset: dataset was generated without frequency offsets");

  const auto preds = predict_classes(net, view);
  std::vector<int> labels(preds.size());
  std::vector<std::string> group_of(preds.size());
  for (std::int64_t i = 0; i < view.size(); ++i) {
    const Example& ex = view.example(i);
    labels[static_cast<std::size_t>(i)] = ex.label;
    std::string g = freq_bin_label(std::fabs(ex.freq_offset), edges);
    if (sign_split) g = (ex.freq_offset < 0 ? "-" : "+") + g;
    group_of[static_cast<std::size_t>(i)] = std::move(g);
  }

  std::vector<std::string> order;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "|df|=[%.3g,%.3g)", edges[i], edges[i + 1]);
    if (sign_split) {
      order.push_back(std::string("-") + buf);
      order.push_back(std::string("+") + buf);
    } else {
      order.push_back(buf);
    }
  }
  MetricsReport report = tally(view.data->class_names, labels, preds, group_of, order);
  // drop empty bins so every listed group is populated
  std::erase_if(report.groups, [](const GroupStat& g) { return g.count == 0; });
  return report;
}

void emit_csv(const MetricsReport& report, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open for writing: " + tmp);
    os << "group,count,correct,accuracy,error_rate\n";
    auto row = [&os](const GroupStat& g) {
      os << g.label << "," << g.count << "," << g.correct << "," << format_g(g.accuracy()) << ","
         << format_g(g.error_rate()) << "\n";
    };
    row(report.overall);
    for (const auto& g : report.groups) row(g);

    os << "confusion";
    for (const auto& name : report.class_names) os << "," << name;
    os << "\n";
    for (Eigen::Index t = 0; t < report.confusion.rows(); ++t) {
      os << report.class_names[static_cast<std::size_t>(t)];
      for (Eigen::Index p = 0; p < report.confusion.cols(); ++p) os << "," << report.confusion(t, p);
      os << "\n";
    }
  }
  std::filesystem::rename(tmp, path);
}

MetricsReport read_metrics_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open metrics csv: " + path);
  std::string line;
  if (!std::getline(is, line) || split_csv_line(line)[0] != "group")
    throw std::runtime_error("bad metrics csv header: " + path);

  MetricsReport report;
  bool in_confusion = false;
  Eigen::Index row = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (!in_confusion && fields[0] == "confusion") {
      in_confusion = true;
      report.class_names.assign(fields.begin() + 1, fields.end());
      const auto n = static_cast<Eigen::Index>(report.class_names.size());
      report.confusion =
          Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
      continue;
    }
    if (in_confusion) {
      if (row >= report.confusion.rows() || fields.size() != report.class_names.size() + 1)
        throw std::runtime_error("bad confusion block in: " + path);
      for (Eigen::Index p = 0; p < report.confusion.cols(); ++p)
        report.confusion(row, p) = std::stoll(fields[static_cast<std::size_t>(p) + 1]);
      ++row;
      continue;
    }
    if (fields.size() != 5) throw std::runtime_error("bad metrics row in: " + path);
    GroupStat g{fields[0], std::stoll(fields[1]), std::stoll(fields[2])};
    if (g.label == "overall")
      report.overall = g;
    else
      report.groups.push_back(g);
  }
  if (row != report.confusion.rows()) throw std::runtime_error("incomplete confusion block in: " + path);
  return report;
}

}  // namespace augmod
