#pragma once

#include "ising1d/bounds.hpp"
#include "ising1d/chain_model.hpp"
#include "ising1d/effective_field.hpp"
#include "ising1d/errors.hpp"
#include "ising1d/random_current.hpp"
#include "ising1d/serialization.hpp"
#include "ising1d/transfer_solver.hpp"
