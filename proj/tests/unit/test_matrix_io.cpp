#include <doctest.h>

#include <cmath>
#include <sstream>

#include "glme/dense_matrix.hpp"
#include "glme/errors.hpp"
#include "glme/matrix_io.hpp"
#include "glme/sparse_matrix.hpp"

using glme::DenseMatrix;
using glme::SparseMatrix;

TEST_CASE("csv round trip preserves every bit") {
    const DenseMatrix a{{M_PI, -1.0 / 3.0}, {1e-300, 6.02214076e23}};
    std::stringstream buf;
    glme::write_csv(buf, a);
    const DenseMatrix b = glme::read_csv(buf);
    REQUIRE(b.rows() == 2);
    REQUIRE(b.cols() == 2);
    CHECK(glme::max_abs_diff(a, b) == 0.0);
}

TEST_CASE("csv reader rejects malformed input") {
    {
        std::stringstream buf("1,2\n3\n");
        CHECK_THROWS_AS(glme::read_csv(buf), glme::IoError);
    }
    {
        std::stringstream buf("1,abc\n");
        CHECK_THROWS_AS(glme::read_csv(buf), glme::IoError);
    }
    {
        std::stringstream buf("");
        CHECK_THROWS_AS(glme::read_csv(buf), glme::IoError);
    }
    {
        std::stringstream buf("1,inf\n");
        CHECK_THROWS_AS(glme::read_csv(buf), glme::IoError);
    }
}

TEST_CASE("csv reader tolerates blank lines and CR line endings") {
    std::stringstream buf("1,2\r\n\r\n3,4\r\n");
    const DenseMatrix a = glme::read_csv(buf);
    REQUIRE(a.rows() == 2);
    CHECK(a(1, 0) == 3.0);
}

TEST_CASE("matrix market round trip") {
    const SparseMatrix s(3, 4, {{0, 0, 1.25}, {2, 3, -7.5}, {1, 2, 1e-12}});
    std::stringstream buf;
    glme::write_matrix_market(buf, s);
    const SparseMatrix t = glme::read_matrix_market(buf);
    CHECK(t.rows() == 3);
    CHECK(t.cols() == 4);
    REQUIRE(t.nnz() == 3);
    CHECK(glme::max_abs_diff(s.to_dense(), t.to_dense()) == 0.0);
}

TEST_CASE("matrix market reader rejects bad banners and counts") {
    {
        std::stringstream buf("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n");
        CHECK_THROWS_AS(glme::read_matrix_market(buf), glme::IoError);
    }
    {
        std::stringstream buf("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 5.0\n");
        CHECK_THROWS_AS(glme::read_matrix_market(buf), glme::IoError);
    }
    {
        std::stringstream buf("%%MatrixMarket matrix coordinate real general\n2 2 1\n0 1 5.0\n");
        CHECK_THROWS_AS(glme::read_matrix_market(buf), glme::IoError);
    }
}
