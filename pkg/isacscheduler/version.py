VERSION = "0.1.0"

APP_NAME = "isacscheduler"
DESCRIPTION = "Planificación de sensado y comunicación que minimiza la edad de la información: solución, certificación estructural y simulación."
