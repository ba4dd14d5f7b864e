#ifndef SPECMKT_SPECMKT_HPP
#define SPECMKT_SPECMKT_HPP

#include "specmkt/best_response.hpp"
#include "specmkt/cli.hpp"
#include "specmkt/closed_form.hpp"
#include "specmkt/config.hpp"
#include "specmkt/csv.hpp"
#include "specmkt/errors.hpp"
#include "specmkt/figures.hpp"
#include "specmkt/foc.hpp"
#include "specmkt/gov.hpp"
#include "specmkt/market.hpp"
#include "specmkt/matrix.hpp"

#endif  // SPECMKT_SPECMKT_HPP
