#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "pseudoherm/serialize.hpp"
#include "test_support.hpp"

using namespace pseudoherm;
using testsupport::distance;

TEST_CASE("matrix json round trip is exact") {
    auto& engine = testsupport::rng(149);
    const ComplexMatrix m = testsupport::random_matrix(5, engine);
    const Json j = matrix_to_json(m);
    const ComplexMatrix back = matrix_from_json(j);
    REQUIRE(back.rows() == 5);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t k = 0; k < 5; ++k) CHECK(back(i, k) == m(i, k));

    // Awkward but finite values survive the text round trip bit-for-bit.
    const ComplexMatrix tricky{{Complex(0.1, -1.0 / 3.0), Complex(1e-308, 2.2250738585072014e-308)},
                               {Complex(9.007199254740993e15, -0.0), Complex(1.7976931348623157e308, 1.0)}};
    const ComplexMatrix tricky_back = matrix_from_json(Json::parse(matrix_to_json(tricky).dump()));
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t k = 0; k < 2; ++k) {
            CHECK(tricky_back(i, k).real() == tricky(i, k).real());
            CHECK(tricky_back(i, k).imag() == tricky(i, k).imag());
        }

    // Serialize -> parse -> serialize is byte-identical.
    CHECK(matrix_to_json(tricky_back).dump() == matrix_to_json(tricky).dump());
}

TEST_CASE("matrix json rejects malformed payloads") {
    CHECK_THROWS_AS(matrix_from_json(Json{{"rows", 2}, {"cols", 2}}), DomainError);
    CHECK_THROWS_AS(matrix_from_json(Json{{"rows", 2}, {"cols", 2}, {"data", Json::array({1, 2})}}),
                    DomainError);
    Json bad = Json{{"rows", 1}, {"cols", 1}, {"data", Json::array({Json::array({1.0})})}};
    CHECK_THROWS_AS(matrix_from_json(bad), DomainError);
}

TEST_CASE("state json uses the column-matrix format") {
    const StateVector psi(std::vector<Complex>{Complex(1.0, -2.0), Complex(0.5, 0.25)});
    const StateVector back = state_from_json(state_to_json(psi));
    REQUIRE(back.dimension() == 2);
    CHECK(back.amplitudes[0] == psi.amplitudes[0]);
    CHECK(back.amplitudes[1] == psi.amplitudes[1]);
    CHECK_THROWS_AS(state_from_json(matrix_to_json(ComplexMatrix::identity(2))), DomainError);
}

TEST_CASE("certificate and system round trips") {
    const ComplexMatrix eta{{1.0, 0.5}, {0.5, 1.0}};
    const MetricCertificate cert = certify_metric(eta);
    const MetricCertificate cert_back = certificate_from_json(certificate_to_json(cert));
    CHECK(cert_back.alpha0 == cert.alpha0);
    CHECK(cert_back.alpha0_min == cert.alpha0_min);
    CHECK(cert_back.lambda_min == cert.lambda_min);
    CHECK(cert_back.min_eigenvalue == cert.min_eigenvalue);
    CHECK(cert_back.positive_definite == cert.positive_definite);

    const ComplexMatrix sigma_y{{0.0, Complex(0.0, -1.0)}, {Complex(0.0, 1.0), 0.0}};
    const auto sys = compose(eta, sigma_y, 1.0, 0.5, {0.25});
    const auto sys_back = system_from_json(system_to_json(sys));
    CHECK(distance(sys_back.op(), sys.op()) == 0.0);
    CHECK(sys_back.a1() == 0.5);
    CHECK(sys_back.b() == std::vector<double>{0.25});
}

TEST_CASE("lattice spec files reject unknown fields") {
    const Json good{{"kind", "uniform"}, {"n", 6}, {"gamma0", 3.0}, {"gamma", 1.0}};
    const LatticeModel model = model_from_spec_json(good);
    CHECK(model.spec.kind == LatticeKind::Uniform);
    CHECK(model.spec.n == 6);

    Json stray = good;
    stray["coupling"] = 2.0;
    CHECK_THROWS_AS(model_from_spec_json(stray), DomainError);

    Json wrong_kind = good;
    wrong_kind["kind"] = "triangular";
    CHECK_THROWS_AS(model_from_spec_json(wrong_kind), DomainError);

    // A vector gamma is only valid for the generic kind.
    Json vector_gamma = good;
    vector_gamma["gamma"] = Json::array({1.0, 2.0});
    CHECK_THROWS_AS(model_from_spec_json(vector_gamma), DomainError);

    const Json generic{{"kind", "generic"},
                       {"n", 4},
                       {"gamma0", 3.0},
                       {"gamma", Json::array({1.0, 0.5, 0.25, 0.75})},
                       {"xi0", 0.2},
                       {"c", 1.0},
                       {"boundary", "periodic"}};
    CHECK(model_from_spec_json(generic).spec.kind == LatticeKind::GenericBalanced);
    Json bad_boundary = generic;
    bad_boundary["boundary"] = "twisted";
    CHECK_THROWS_AS(model_from_spec_json(bad_boundary), DomainError);

    const Json ssh{{"kind", "ssh"}, {"m", 2}, {"gamma0", 3.0}, {"delta1", 1.0},
                   {"delta2", 0.5},  {"c", 1.0}};
    CHECK(model_from_spec_json(ssh).spec.kind == LatticeKind::Ssh);
}

TEST_CASE("model bundle round trip") {
    for (const Json spec :
         {Json{{"kind", "uniform"}, {"n", 5}, {"gamma0", 3.0}, {"gamma", 1.0}},
          Json{{"kind", "ssh"}, {"m", 2}, {"gamma0", 3.0}, {"delta1", 1.0}, {"delta2", 0.5}, {"c", 1.0}},
          Json{{"kind", "generic"},
               {"n", 4},
               {"gamma0", 3.0},
               {"gamma", Json::array({1.0, 0.5, 0.25, 0.0})},
               {"xi0", 0.2},
               {"c", 1.0},
               {"boundary", "open"}}}) {
        const LatticeModel model = model_from_spec_json(spec);
        const LatticeModel back = model_from_json(model_to_json(model));
        CHECK(distance(back.hamiltonian, model.hamiltonian) == 0.0);
        CHECK(distance(back.eta, model.eta) == 0.0);
        CHECK(back.spec.kind == model.spec.kind);
        CHECK(back.spec.gamma == model.spec.gamma);
        CHECK(model_to_json(back).dump() == model_to_json(model).dump());
    }
}

TEST_CASE("structure constant dump is canonical jsonl") {
    const SuBasis basis(2);
    const StructureConstants fd = structure_constants(basis);
    std::ostringstream os;
    write_structure_constants_jsonl(os, fd);
    // su(2): a single canonical triple (1,2,3) with f = 1, d = 0.
    const std::string dump = os.str();
    CHECK(dump == "{\"a\":1,\"b\":2,\"c\":3,\"d\":0.0,\"f\":1.0}\n");
}
