# Exporters module: draws / diagnostics / coefficient-plot CSVs, summary tables, run manifest
