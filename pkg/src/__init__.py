# choice-gibbs: Bayesian binary, multinomial and binomial logit/probit models by Gibbs sampling
__version__ = "0.1.0"
