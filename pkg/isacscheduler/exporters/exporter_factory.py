from isacscheduler.exporters.exporter_base import AbstractExporter

# Necesito realizar estos imports para que se registren las subclases y
# AbstractExporter.__subclasses__() las retorne correctamente a todas.
from isacscheduler.exporters import text_exporters, image_exporters


class ExporterFactory:
    _exporters = {}

    @staticmethod
    def getExporter(outputFormat, outputDir, header, **options):
        if not ExporterFactory._exporters:
            ExporterFactory._loadExporters()

        if outputFormat not in ExporterFactory._exporters:
            raise ValueError("No existe un exportador para el formato '{0}'.".format(outputFormat))

        return ExporterFactory._exporters[outputFormat](outputDir, header, **options)

    @staticmethod
    def getAllExporters():
        if not ExporterFactory._exporters:
            ExporterFactory._loadExporters()

        return ExporterFactory._exporters.values()

    @staticmethod
    def getFormats():
        return sorted(exporter.FORMAT for exporter in ExporterFactory.getAllExporters())

    @staticmethod
    def _loadExporters():
        for exporter in AbstractExporter.__subclasses__():
            ExporterFactory._exporters[exporter.FORMAT] = exporter
