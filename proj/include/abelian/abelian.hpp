#pragma once

#include "abelian/adversary.hpp"
#include "abelian/chain.hpp"
#include "abelian/deterministic_generators.hpp"
#include "abelian/errors.hpp"
#include "abelian/experiments.hpp"
#include "abelian/ground_truth.hpp"
#include "abelian/integer_matrix.hpp"
#include "abelian/isomorphism.hpp"
#include "abelian/monomial_group.hpp"
#include "abelian/number_theory.hpp"
#include "abelian/oracle.hpp"
#include "abelian/randomized_generators.hpp"
#include "abelian/snf_basis.hpp"
