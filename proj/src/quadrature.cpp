#include "tetmf/quadrature.hpp"

#include <algorithm>
#include <string>

namespace tetmf {

namespace {

struct TetPoint {
  double x, y, z, w;
};
struct TriPoint {
  double x, y, w;
};

// degree 1, 1 point
constexpr TetPoint tet1[] = {
    {0.25, 0.25, 0.25, 0.166666666666666666667},
};

// degree 2, 4 points
constexpr TetPoint tet2[] = {
    {0.13819660112501051518, 0.13819660112501051518, 0.585410196624968454461, 0.0416666666666666666667},
    {0.13819660112501051518, 0.585410196624968454461, 0.13819660112501051518, 0.0416666666666666666667},
    {0.585410196624968454461, 0.13819660112501051518, 0.13819660112501051518, 0.0416666666666666666667},
    {0.13819660112501051518, 0.13819660112501051518, 0.13819660112501051518, 0.0416666666666666666667},
};

// degree 3, 8 points
constexpr TetPoint tet3[] = {
    {0.332563876206481554586, 0.332563876206481554586, 0.00230837138055533624259, 0.0369434525180493518394},
    {0.332563876206481554586, 0.00230837138055533624259, 0.332563876206481554586, 0.0369434525180493518394},
    {0.00230837138055533624259, 0.332563876206481554586, 0.332563876206481554586, 0.0369434525180493518394},
    {0.332563876206481554586, 0.332563876206481554586, 0.332563876206481554586, 0.0369434525180493518394},
    {0.0113533976647222705964, 0.0113533976647222705964, 0.965939807005833188211, 0.00472321414861731482729},
    {0.0113533976647222705964, 0.965939807005833188211, 0.0113533976647222705964, 0.00472321414861731482729},
    {0.965939807005833188211, 0.0113533976647222705964, 0.0113533976647222705964, 0.00472321414861731482729},
    {0.0113533976647222705964, 0.0113533976647222705964, 0.0113533976647222705964, 0.00472321414861731482729},
};

// degree 5, 14 points
constexpr TetPoint tet5[] = {
    {0.310885919263300609797, 0.310885919263300609797, 0.067342242210098170608, 0.0187813209530026417999},
    {0.310885919263300609797, 0.067342242210098170608, 0.310885919263300609797, 0.0187813209530026417999},
    {0.067342242210098170608, 0.310885919263300609797, 0.310885919263300609797, 0.0187813209530026417999},
    {0.310885919263300609797, 0.310885919263300609797, 0.310885919263300609797, 0.0187813209530026417999},
    {0.0927352503108912264023, 0.0927352503108912264023, 0.721794249067326320793, 0.0122488405193936582573},
    {0.0927352503108912264023, 0.721794249067326320793, 0.0927352503108912264023, 0.0122488405193936582573},
    {0.721794249067326320793, 0.0927352503108912264023, 0.0927352503108912264023, 0.0122488405193936582573},
    {0.0927352503108912264023, 0.0927352503108912264023, 0.0927352503108912264023, 0.0122488405193936582573},
    {0.454496295874350350508, 0.0455037041256496494919, 0.0455037041256496494919, 0.00709100346284691107301},
    {0.0455037041256496494919, 0.454496295874350350508, 0.0455037041256496494919, 0.00709100346284691107301},
    {0.0455037041256496494919, 0.0455037041256496494919, 0.454496295874350350508, 0.00709100346284691107301},
    {0.454496295874350350508, 0.454496295874350350508, 0.0455037041256496494919, 0.00709100346284691107301},
    {0.454496295874350350508, 0.0455037041256496494919, 0.454496295874350350508, 0.00709100346284691107301},
    {0.0455037041256496494919, 0.454496295874350350508, 0.454496295874350350508, 0.00709100346284691107301},
};

// degree 7, 35 points
constexpr TetPoint tet7[] = {
    {0.25, 0.25, 0.25, 0.0159142149106884748101},
    {0.315701149778202799423, 0.315701149778202799423, 0.0528965506653916017297, 0.00705493020166117151271},
    {0.315701149778202799423, 0.0528965506653916017297, 0.315701149778202799423, 0.00705493020166117151271},
    {0.0528965506653916017297, 0.315701149778202799423, 0.315701149778202799423, 0.00705493020166117151271},
    {0.315701149778202799423, 0.315701149778202799423, 0.315701149778202799423, 0.00705493020166117151271},
    {0.449510177401603631237, 0.0504898225983963687631, 0.0504898225983963687631, 0.00531615463880959665571},
    {0.0504898225983963687631, 0.449510177401603631237, 0.0504898225983963687631, 0.00531615463880959665571},
    {0.0504898225983963687631, 0.0504898225983963687631, 0.449510177401603631237, 0.00531615463880959665571},
    {0.449510177401603631237, 0.449510177401603631237, 0.0504898225983963687631, 0.00531615463880959665571},
    {0.449510177401603631237, 0.0504898225983963687631, 0.449510177401603631237, 0.00531615463880959665571},
    {0.0504898225983963687631, 0.449510177401603631237, 0.449510177401603631237, 0.00531615463880959665571},
    {0.188833831026001047736, 0.0471607003609978810439, 0.575171637587000023483, 0.00620118845472243689494},
    {0.188833831026001047736, 0.575171637587000023483, 0.0471607003609978810439, 0.00620118845472243689494},
    {0.0471607003609978810439, 0.188833831026001047736, 0.575171637587000023483, 0.00620118845472243689494},
    {0.0471607003609978810439, 0.575171637587000023483, 0.188833831026001047736, 0.00620118845472243689494},
    {0.575171637587000023483, 0.188833831026001047736, 0.0471607003609978810439, 0.00620118845472243689494},
    {0.575171637587000023483, 0.0471607003609978810439, 0.188833831026001047736, 0.00620118845472243689494},
    {0.188833831026001047736, 0.188833831026001047736, 0.575171637587000023483, 0.00620118845472243689494},
    {0.188833831026001047736, 0.575171637587000023483, 0.188833831026001047736, 0.00620118845472243689494},
    {0.575171637587000023483, 0.188833831026001047736, 0.188833831026001047736, 0.00620118845472243689494},
    {0.188833831026001047736, 0.188833831026001047736, 0.0471607003609978810439, 0.00620118845472243689494},
    {0.188833831026001047736, 0.0471607003609978810439, 0.188833831026001047736, 0.00620118845472243689494},
    {0.0471607003609978810439, 0.188833831026001047736, 0.188833831026001047736, 0.00620118845472243689494},
    {0.0212654725414832459888, 0.146638813818484946904, 0.810830241098548561118, 0.00135179513831722359435},
    {0.0212654725414832459888, 0.810830241098548561118, 0.146638813818484946904, 0.00135179513831722359435},
    {0.146638813818484946904, 0.0212654725414832459888, 0.810830241098548561118, 0.00135179513831722359435},
    {0.146638813818484946904, 0.810830241098548561118, 0.0212654725414832459888, 0.00135179513831722359435},
    {0.810830241098548561118, 0.0212654725414832459888, 0.146638813818484946904, 0.00135179513831722359435},
    {0.810830241098548561118, 0.146638813818484946904, 0.0212654725414832459888, 0.00135179513831722359435},
    {0.0212654725414832459888, 0.0212654725414832459888, 0.810830241098548561118, 0.00135179513831722359435},
    {0.0212654725414832459888, 0.810830241098548561118, 0.0212654725414832459888, 0.00135179513831722359435},
    {0.810830241098548561118, 0.0212654725414832459888, 0.0212654725414832459888, 0.00135179513831722359435},
    {0.0212654725414832459888, 0.0212654725414832459888, 0.146638813818484946904, 0.00135179513831722359435},
    {0.0212654725414832459888, 0.146638813818484946904, 0.0212654725414832459888, 0.00135179513831722359435},
    {0.146638813818484946904, 0.0212654725414832459888, 0.0212654725414832459888, 0.00135179513831722359435},
};

// degree 2, 3 points
constexpr TriPoint tri2[] = {
    {0.166666666666666666667, 0.666666666666666666667, 0.166666666666666666667},
    {0.666666666666666666667, 0.166666666666666666667, 0.166666666666666666667},
    {0.166666666666666666667, 0.166666666666666666667, 0.166666666666666666667},
};

// degree 4, 6 points
constexpr TriPoint tri4[] = {
    {0.445948490915964886318, 0.108103018168070227363, 0.111690794839005732848},
    {0.108103018168070227363, 0.445948490915964886318, 0.111690794839005732848},
    {0.445948490915964886318, 0.445948490915964886318, 0.111690794839005732848},
    {0.0915762135097707434596, 0.816847572980458513081, 0.0549758718276609338192},
    {0.816847572980458513081, 0.0915762135097707434596, 0.0549758718276609338192},
    {0.0915762135097707434596, 0.0915762135097707434596, 0.0549758718276609338192},
};

// degree 6, 12 points
constexpr TriPoint tri6[] = {
    {0.21942998254978296, 0.56114003490043408, 0.0856665620764905150601},
    {0.56114003490043408, 0.21942998254978296, 0.0856665620764905150601},
    {0.21942998254978296, 0.21942998254978296, 0.0856665620764905150601},
    {0.480137964112215044029, 0.0397240717755699119421, 0.0403655447965154891548},
    {0.0397240717755699119421, 0.480137964112215044029, 0.0403655447965154891548},
    {0.480137964112215044029, 0.480137964112215044029, 0.0403655447965154891548},
    {0.0193717243612407883799, 0.839009259714791053208, 0.0203172798968303312259},
    {0.839009259714791053208, 0.0193717243612407883799, 0.0203172798968303312259},
    {0.141619015923968158412, 0.839009259714791053208, 0.0203172798968303312259},
    {0.839009259714791053208, 0.141619015923968158412, 0.0203172798968303312259},
    {0.141619015923968158412, 0.0193717243612407883799, 0.0203172798968303312259},
    {0.0193717243612407883799, 0.141619015923968158412, 0.0203172798968303312259},
};
constexpr TriPoint tri1[] = {
    {0.333333333333333333333, 0.333333333333333333333, 0.5},
};

template <std::size_t N>
QuadratureRule from_table(const TetPoint (&t)[N], int degree) {
  QuadratureRule r;
  r.dim = 3;
  r.exactness_degree = degree;
  for (const auto& p : t) {
    r.points.push_back({p.x, p.y, p.z});
    r.weights.push_back(p.w);
  }
  return r;
}

template <std::size_t N>
QuadratureRule from_table(const TriPoint (&t)[N], int degree) {
  QuadratureRule r;
  r.dim = 2;
  r.exactness_degree = degree;
  for (const auto& p : t) {
    r.points.push_back({p.x, p.y, 0.0});
    r.weights.push_back(p.w);
  }
  return r;
}

void check_degree(int p) {
  if (p < 1 || p > 3) throw Error("unsupported polynomial degree " + std::to_string(p));
}

}  // namespace

QuadratureRule tet_rule(int degree) {
  if (degree < 0 || degree > 7) throw Error("no tetrahedron rule of degree " + std::to_string(degree));
  if (degree <= 1) return from_table(tet1, 1);
  if (degree == 2) return from_table(tet2, 2);
  if (degree == 3) return from_table(tet3, 3);
  if (degree <= 5) return from_table(tet5, 5);
  return from_table(tet7, 7);
}

QuadratureRule triangle_rule(int degree) {
  if (degree < 0 || degree > 6) throw Error("no triangle rule of degree " + std::to_string(degree));
  if (degree <= 1) return from_table(tri1, 1);
  if (degree == 2) return from_table(tri2, 2);
  if (degree <= 4) return from_table(tri4, 4);
  return from_table(tri6, 6);
}

QuadratureRule make_cell_quadrature(int p, QuadratureVariant variant) {
  check_degree(p);
  const int degree = variant == QuadratureVariant::Standard ? 2 * p : std::max(2 * p - 2, 1);
  QuadratureRule r = tet_rule(degree);
  r.exactness_degree = degree;
  return r;
}

QuadratureRule make_face_quadrature(int p) {
  check_degree(p);
  QuadratureRule r = triangle_rule(2 * p);
  r.exactness_degree = 2 * p;
  return r;
}

}  // namespace tetmf
