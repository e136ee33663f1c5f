"""
Service layer: p-adic arithmetic, linear algebra, Mahler basis, embedding, regression,
training, the Gibbs oracle, dataset files, targets and reports.
"""
