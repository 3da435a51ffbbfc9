#include "dpmix/mixture_json.hpp"

#include <fstream>
#include <stdexcept>

namespace dpmix {

nlohmann::json mixture_to_json(const MixtureDensity& f) {
  nlohmann::json j;
  j["weights"] = f.weights;
  auto& means = j["means"] = nlohmann::json::array();
  auto& covs = j["covs"] = nlohmann::json::array();
  for (const auto& c : f.components) {
    nlohmann::json m = nlohmann::json::array();
    for (int i = 0; i < c.dim(); ++i) m.push_back(c.mean(i));
    means.push_back(std::move(m));
    nlohmann::json cov = nlohmann::json::array();
    for (int r = 0; r < c.dim(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (int k = 0; k < c.dim(); ++k) row.push_back(c.cov.matrix()(r, k));
      cov.push_back(std::move(row));
    }
    covs.push_back(std::move(cov));
  }
  return j;
}

MixtureDensity mixture_from_json(const nlohmann::json& j) {
  for (const char* key : {"weights", "means", "covs"})
    if (!j.contains(key) || !j.at(key).is_array())
      throw std::invalid_argument(std::string("mixture json: missing array '") + key + "'");
  const auto& jw = j.at("weights");
  const auto& jm = j.at("means");
  const auto& jc = j.at("covs");
  if (jw.size() != jm.size() || jw.size() != jc.size())
    throw std::invalid_argument("mixture json: weights/means/covs lengths differ");
  if (jw.empty()) throw std::invalid_argument("mixture json: empty mixture");

  std::vector<double> weights;
  std::vector<GaussianComponent> comps;
  const std::size_t d = jm.at(0).size();
  for (std::size_t h = 0; h < jw.size(); ++h) {
    weights.push_back(jw.at(h).get<double>());
    const auto& m = jm.at(h);
    if (m.size() != d)
      throw std::invalid_argument("mixture json: inconsistent mean dimension at component " +
                                  std::to_string(h));
    Eigen::VectorXd mean(d);
    for (std::size_t i = 0; i < d; ++i) mean(i) = m.at(i).get<double>();
    const auto& cm = jc.at(h);
    if (cm.size() != d)
      throw std::invalid_argument("mixture json: cov row count mismatch at component " +
                                  std::to_string(h));
    Eigen::MatrixXd cov(d, d);
    for (std::size_t r = 0; r < d; ++r) {
      if (cm.at(r).size() != d)
        throw std::invalid_argument("mixture json: cov column count mismatch at component " +
                                    std::to_string(h));
      for (std::size_t k = 0; k < d; ++k) cov(r, k) = cm.at(r).at(k).get<double>();
    }
    comps.emplace_back(std::move(mean), SPDMatrix(cov));
  }
  return MixtureDensity(std::move(weights), std::move(comps));
}

MixtureDensity load_mixture(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_mixture: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("load_mixture: parse error in '" + path + "': " + e.what());
  }
  return mixture_from_json(j);
}

void save_mixture(const std::string& path, const MixtureDensity& f) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_mixture: cannot open '" + path + "'");
  out << mixture_to_json(f).dump(2) << "\n";
}

}  // namespace dpmix
